import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from uncrit import cases
from uncrit.analytic import jacobi_branches
from uncrit.errors import InputError
from uncrit.io import (branches_to_dict, components_to_dict, dumps, patch_graph_to_dict, read_ensemble,
                       read_family, read_grid, write_ensemble_raw, write_family, write_grid)
from uncrit.svg import branch_plot, density_plot_1d, density_plot_2d, ramp


def test_dumps_is_sorted_and_full_precision():
    s = dumps({"b": 0.1, "a": [1, 2.5, True, None], "c": {"z": 1 / 3}})
    assert s.index('"a"') < s.index('"b"') < s.index('"c"')
    assert "0.10000000000000001" in s and "0.33333333333333331" in s
    assert json.loads(s)["c"]["z"] == 1 / 3
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})


def test_grid_and_family_files(tmp_path):
    grid, fam = cases.parabola_sine(21)
    write_grid(tmp_path / "g.json", grid)
    write_family(tmp_path / "f.json", fam)
    assert read_grid(tmp_path / "g.json").n == 21
    np.testing.assert_array_equal(read_family(tmp_path / "f.json").g, fam.g)
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(InputError):
        read_family(tmp_path / "bad.json")
    with pytest.raises(InputError):
        read_family(tmp_path / "missing.json")


def test_ensemble_formats(tmp_path):
    X = np.random.default_rng(0).standard_normal((5, 4))
    np.savetxt(tmp_path / "e.csv", X, delimiter=",", fmt="%.17g")
    np.testing.assert_array_equal(read_ensemble(tmp_path / "e.csv"), X)
    write_ensemble_raw(tmp_path / "e.bin", X)
    np.testing.assert_array_equal(read_ensemble(tmp_path / "e.bin"), X)
    (tmp_path / "r.csv").write_text("1,2\n3\n")
    with pytest.raises(InputError):
        read_ensemble(tmp_path / "r.csv")


def test_exports_have_documented_fields(helicoid_extraction):
    comp = components_to_dict(helicoid_extraction)["components"][0]
    assert {"id", "type", "multiplicity_max", "patches", "vertices", "support"} <= set(comp)
    assert "intervals" in comp["support"]
    pg = patch_graph_to_dict(helicoid_extraction.graph)
    assert {"id", "vertex", "type", "multiplicity", "sign_vector", "witness"} == set(pg["nodes"][0])
    assert {"a", "b", "same_type", "shared_constraints"} == set(pg["edges"][0])
    br = branches_to_dict(jacobi_branches(cases.parabola_sine_pair()))["branches"][0]
    assert {"interval", "type", "breakpoints", "probability"} == set(br)


def test_ramp_endpoints():
    assert ramp("maximum", 0) == "#ffffff" and ramp("maximum", 1) == "#ff0000"
    assert ramp("minimum", 1) == "#0000ff"


def test_svgs_are_well_formed():
    s1 = density_plot_1d([{"id": 0, "type": "maximum", "x": [0, 1, 2], "density": [0, 0.5, 1],
                           "dual": [[0, 0.5], [0.5, 1.5], [1.5, 2]]}])
    s2 = density_plot_1d([{"id": 0, "type": "minimum", "x": [0, 1], "density": [0, 0], "dual": [[0, 0.5], [0.5, 1]]}])
    s3 = density_plot_2d([{"type": "maximum", "polygon": [[0, 0], [1, 0], [0, 1]], "value": 1.0}],
                         [{"id": 0, "type": "maximum",
                           "polygons": [{"exterior": [[0, 0], [1, 0], [0, 1], [0, 0]], "holes": []}]}])
    for s in (s1, s2, s3):
        ET.fromstring(s)
    # an all-zero density leaves its group empty
    g = ET.fromstring(s2).find("{http://www.w3.org/2000/svg}g")
    assert len(g) == 0


def test_branch_plot_has_one_shape_per_branch():
    brs = jacobi_branches(cases.parabola_sine_pair((-4, 4)))
    curves = [{"branch": k, "x": list(np.linspace(b.lo + 1e-3, b.hi - 1e-3, 5)), "density": [0.1] * 5}
              for k, b in enumerate(brs)]
    s = branch_plot(branches_to_dict(brs)["branches"], curves)
    root = ET.fromstring(s)
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polygon[@class='branch']")) == 5
