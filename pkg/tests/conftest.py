import numpy as np
import pytest

from uncrit import cases
from uncrit.extract import extract
from uncrit.patches import build_patch_graph


@pytest.fixture(scope="session")
def helicoid_extraction():
    grid, fam = cases.helicoid()
    return extract(build_patch_graph(fam, grid))


@pytest.fixture(scope="session")
def parabola_extraction():
    grid, fam = cases.parabola_sine(281)
    return extract(build_patch_graph(fam, grid))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
