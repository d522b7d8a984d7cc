"""Uncertain critical points of linear multiparameter families of PL scalar fields."""

from .errors import ConfigError, InputError, NumericalError, UncritError
from .extract import Extraction, UncertainCriticalPoint, extract
from .family import LinearFamily, ParameterDistribution, eof_decompose, evaluate, sample_parameters
from .mesh import Grid, build_line_grid, build_triangle_grid
from .patches import build_patch_graph, enumerate_patches
from .prob import Region, density_field, joint_probability, patch_probability, region_probability

__all__ = [
    "ConfigError", "InputError", "NumericalError", "UncritError",
    "Extraction", "UncertainCriticalPoint", "extract",
    "LinearFamily", "ParameterDistribution", "eof_decompose", "evaluate", "sample_parameters",
    "Grid", "build_line_grid", "build_triangle_grid",
    "build_patch_graph", "enumerate_patches",
    "Region", "density_field", "joint_probability", "patch_probability", "region_probability",
]

__version__ = "0.1.0"
