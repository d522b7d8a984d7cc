import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from uncrit import cases
from uncrit.cli import main
from uncrit.io import write_family, write_grid
from uncrit.mesh import structured_triangle_grid

TWO_PI = 2 * np.pi


def run(*args):
    return main([str(a) for a in args])


def test_extract_helicoid_and_rerun_is_byte_identical(tmp_path):
    assert run("extract", "--case", "helicoid", "--out", tmp_path / "a") == 0
    assert run("extract", "--case", "helicoid", "--out", tmp_path / "b") == 0
    comp = json.loads((tmp_path / "a" / "components.json").read_text())
    assert len(comp["components"]) == 2
    for name in ("components.json", "patchgraph.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_empty_family_exits_3(tmp_path, capsys):
    grid, _ = cases.parabola_sine(5)
    write_grid(tmp_path / "g.json", grid)
    (tmp_path / "f.json").write_text(json.dumps({"m": 1, "g0": [], "modes": [[]]}))
    assert run("extract", "--grid", tmp_path / "g.json", "--family", tmp_path / "f.json", "--out", tmp_path) == 3
    assert "empty" in capsys.readouterr().err


def test_probability_helicoid(tmp_path):
    regions = json.dumps([{"intervals": [[0, TWO_PI]]}, {"intervals": [[TWO_PI, 2 * TWO_PI]]},
                          {"intervals": [[0, np.pi]]}, {"intervals": [[TWO_PI, 3 * np.pi]]},
                          {"intervals": [[50, 60]]}])
    assert run("probability", "--case", "helicoid", "--ucp", 0, "--regions", regions, "--out", tmp_path,
               "--samples", 5000) == 0
    est = json.loads((tmp_path / "estimates.json").read_text())["estimates"][0]
    r = [x["value"] for x in est["regions"]]
    assert r[0] == pytest.approx(1, abs=0.01) and r[1] == pytest.approx(1, abs=0.01)
    assert r[2] == pytest.approx(0.5, abs=0.02) and r[3] == pytest.approx(0.5, abs=0.02)
    assert r[4] == 0.0
    assert est["joints"][0]["joint"]["value"] == pytest.approx(1, abs=0.01)


def test_unknown_ucp_exits_2(tmp_path):
    assert run("probability", "--case", "helicoid", "--ucp", 77, "--out", tmp_path) == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"case": "helicoid", "samples": 300, "seed": 5, "ucp": [0],
                               "regions": [{"intervals": [[0, 3]]}]}))
    assert run("probability", "--config", cfg, "--samples", 400, "--out", tmp_path) == 0
    out = json.loads((tmp_path / "estimates.json").read_text())
    assert out["samples"] == 400 and out["seed"] == 5
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run("extract", "--config", cfg, "--out", tmp_path) == 2
    assert run("probability", "--case", "helicoid", "--samples", 10, "--out", tmp_path) == 2


def test_density_pl_and_analytic(tmp_path):
    assert run("density", "--case", "parabola-sine", "--samples", 2000, "--svg", "--out", tmp_path / "pl") == 0
    rows = (tmp_path / "pl" / "density.csv").read_text().splitlines()
    assert rows[0] == "ucp,vertex,x,density"
    ET.parse(tmp_path / "pl" / "plot.svg")
    assert run("density", "--case", "parabola-sine", "--mode", "analytic", "--x-range", -4, 4, "--svg",
               "--out", tmp_path / "an") == 0
    root = ET.parse(tmp_path / "an" / "plot.svg").getroot()
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polygon[@class='branch']")) == 5
    assert (tmp_path / "an" / "curve.csv").read_text().startswith("branch,x,a,density")


def test_density_2d_bumps_outlines_maximum(tmp_path):
    assert run("density", "--case", "gaussian-bumps", "--resolution", 11, "--samples", 1000, "--svg",
               "--interpolate-display", "--out", tmp_path) == 0
    data = json.loads((tmp_path / "density.json").read_text())
    maxima = [u for u in data["ucps"] if u["type"] == "maximum"]
    assert len(maxima) == 1
    root = ET.parse(tmp_path / "plot.svg").getroot()
    outlines = root.findall(".//{http://www.w3.org/2000/svg}g[@class='outline']")
    assert any(g.get("data-type") == "maximum" for g in outlines)


def test_eof_command(tmp_path):
    grid = structured_triangle_grid(9, 9, (-1, 1), (-1, 1))
    X = cases.two_mode_ensemble(grid, members=200)
    np.savetxt(tmp_path / "ens.csv", X, delimiter=",", fmt="%.17g")
    assert run("eof", "--ensemble", tmp_path / "ens.csv", "--m", 2, "--out", tmp_path) == 0
    info = json.loads((tmp_path / "eof.json").read_text())
    assert info["m"] == 2 and sum(info["explained_variance"]) >= 0.99
    assert (tmp_path / "qq.csv").read_text().startswith("k,normal_quantile,mode1,mode2")
    assert run("eof", "--ensemble", tmp_path / "ens.csv", "--m", 500, "--out", tmp_path) == 2
    np.savetxt(tmp_path / "same.csv", np.tile(X[0], (10, 1)), delimiter=",", fmt="%.17g")
    assert run("eof", "--ensemble", tmp_path / "same.csv", "--m", 1, "--out", tmp_path) == 4


def test_extract_from_ensemble(tmp_path):
    grid = structured_triangle_grid(7, 7, (-1, 1), (-1, 1))
    write_grid(tmp_path / "g.json", grid)
    np.savetxt(tmp_path / "ens.csv", cases.two_mode_ensemble(grid, members=50), delimiter=",", fmt="%.17g")
    assert run("extract", "--grid", tmp_path / "g.json", "--ensemble", tmp_path / "ens.csv", "--m", 2,
               "--out", tmp_path) == 0


def test_missing_file_exits_3(tmp_path):
    assert run("extract", "--grid", tmp_path / "nope.json", "--family", tmp_path / "nope.json") == 3


def test_verify_commands(capsys):
    assert run("verify", "--case", "helicoid", "--samples", 4000) == 0
    out = capsys.readouterr().out
    assert "UCP count: 2 (expected 2)" in out and "P[2pi,4pi)" in out
    assert run("verify", "--case", "parabola-sine", "--x-range", -4, 4) == 0
