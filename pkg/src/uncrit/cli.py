"""``uncrit`` command line: extract | probability | density | eof | verify."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import cases
from .analytic import curve_table, jacobi_branches
from .errors import ConfigError, InputError, UncritError
from .extract import Extraction, extract
from .family import LinearFamily, ParameterDistribution, eof_decompose, qq_table
from .io import (branches_to_dict, components_to_dict, density_rows, patch_graph_to_dict, read_ensemble,
                 read_family, read_grid, read_json, write_csv, write_family, write_json)
from .mesh import Grid, dual_cell_polygon, dual_interval
from .patches import build_patch_graph
from .prob import Region, density_fields, query_batch
from .svg import branch_plot, density_plot_1d, density_plot_2d
from .verify import CASES, run_case

log = logging.getLogger("uncrit")

BUILTIN = ("helicoid", "parabola-sine", "gaussian-bumps")


@dataclass
class RunConfig:
    grid: str | None = None
    family: str | None = None
    ensemble: str | None = None
    case: str | None = None
    resolution: int | None = None
    x_range: tuple[float, float] | None = None
    m: int | None = None
    weights: str | None = None
    dist: dict | None = None
    include_boundary: bool = False
    samples: int = 20_000
    seed: int = 0
    regions: list = field(default_factory=list)
    ucp: list = field(default_factory=list)
    out: str = "."
    svg: bool = False
    interpolate_display: bool = False
    colormap: str = "diverging"
    mode: str = "pl"

    def validate(self) -> "RunConfig":
        if self.samples < 100:
            raise ConfigError(f"--samples must be >= 100, got {self.samples}")
        if self.case is not None and self.case not in BUILTIN + tuple(CASES):
            raise ConfigError(f"unknown case {self.case!r}")
        for attr in ("grid", "family", "ensemble", "weights"):
            p = getattr(self, attr)
            if p is not None and not Path(p).exists():
                raise InputError(f"--{attr}: file not found: {p}")
        if self.mode not in ("pl", "analytic"):
            raise ConfigError("--mode must be 'pl' or 'analytic'")
        if self.colormap != "diverging":
            raise ConfigError("only the 'diverging' colormap is available")
        return self


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    data = read_json(path)
    known = {f.name for f in fields(RunConfig)}
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _json_arg(text: str, what: str):
    """Inline JSON, or a path to a JSON file."""
    if Path(text).exists():
        return read_json(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(f"{what}: neither a file nor valid JSON: {text!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(**_load_config(args.config))
    over = {}
    for name in ("grid", "family", "ensemble", "case", "resolution", "m", "weights", "samples", "seed", "out", "mode"):
        val = getattr(args, name, None)
        if val is not None:
            over[name] = val
    if getattr(args, "x_range", None) is not None:
        over["x_range"] = tuple(args.x_range)
    if getattr(args, "dist", None) is not None:
        over["dist"] = _json_arg(args.dist, "--dist") if args.dist != "standard" else None
    if getattr(args, "regions", None) is not None:
        over["regions"] = _json_arg(args.regions, "--regions")
    if getattr(args, "ucp", None):
        over["ucp"] = list(args.ucp)
    for flag in ("include_boundary", "svg", "interpolate_display"):
        if getattr(args, flag, False):
            over[flag] = True
    return replace(cfg, **over).validate()


def _distribution(cfg: RunConfig, m: int) -> ParameterDistribution:
    if not cfg.dist:
        return ParameterDistribution(m)
    try:
        return ParameterDistribution(m, cfg.dist.get("mean"), cfg.dist.get("factor"))
    except AttributeError:
        raise ConfigError("--dist must be 'standard' or {\"mean\": [...], \"factor\": [[...]]}") from None


def _case_inputs(cfg: RunConfig) -> tuple[Grid, LinearFamily]:
    kw = {}
    if cfg.case == "helicoid":
        if cfg.resolution:
            kw["n"] = cfg.resolution
        return cases.helicoid(**kw)
    if cfg.case == "parabola-sine":
        if cfg.resolution:
            kw["n"] = cfg.resolution
        if cfg.x_range:
            kw["x_range"] = cfg.x_range
        return cases.parabola_sine(**kw)
    if cfg.case == "gaussian-bumps":
        if cfg.resolution:
            kw["nx"] = kw["ny"] = cfg.resolution
        return cases.gaussian_bumps(**kw)
    raise ConfigError(f"case {cfg.case!r} has no built-in input")


def load_inputs(cfg: RunConfig) -> tuple[Grid, LinearFamily]:
    if cfg.case is not None:
        return _case_inputs(cfg)
    if cfg.grid is None:
        raise ConfigError("need --case or --grid with --family/--ensemble")
    grid = read_grid(cfg.grid)
    if cfg.family is not None:
        fam = read_family(cfg.family)
    elif cfg.ensemble is not None:
        if cfg.m is None:
            raise ConfigError("--ensemble needs --m")
        fam = _eof(cfg).family
    else:
        raise ConfigError("need --family or --ensemble")
    if fam.n != grid.n:
        raise InputError(f"family has {fam.n} values per field, grid has {grid.n} vertices")
    if cfg.m is not None and cfg.family is not None and cfg.m != fam.m:
        raise ConfigError(f"--m={cfg.m} but the family has m={fam.m}")
    return grid, fam


def _eof(cfg: RunConfig):
    X = read_ensemble(cfg.ensemble)
    w = None
    if cfg.weights is not None:
        w = np.loadtxt(cfg.weights, delimiter=",", ndmin=1)
    return eof_decompose(X, cfg.m, w)


def _out(cfg: RunConfig) -> Path:
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _extraction(cfg: RunConfig) -> Extraction:
    grid, fam = load_inputs(cfg)
    return extract(build_patch_graph(fam, grid, include_boundary=cfg.include_boundary))


def _selected(ex: Extraction, cfg: RunConfig) -> list[int]:
    if not cfg.ucp:
        return [u.id for u in ex.ucps]
    for u in cfg.ucp:
        try:
            ex.ucp(int(u))
        except KeyError:
            raise ConfigError(f"unknown UCP id {u}; known ids: {[w.id for w in ex.ucps]}") from None
    return [int(u) for u in cfg.ucp]


# ---------------------------------------------------------------- commands


def cmd_extract(cfg: RunConfig) -> int:
    ex = _extraction(cfg)
    out = _out(cfg)
    write_json(out / "components.json", components_to_dict(ex))
    write_json(out / "patchgraph.json", patch_graph_to_dict(ex.graph))
    print(f"{len(ex.ucps)} uncertain critical points -> {out / 'components.json'}")
    return 0


def _regions(cfg: RunConfig) -> list[Region]:
    raw = cfg.regions
    if isinstance(raw, dict):
        raw = raw.get("regions", [])
    try:
        return [Region.from_dict(r) if isinstance(r, dict) else Region.of_intervals([r]) for r in raw]
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"bad region definition: {exc}") from None


def cmd_probability(cfg: RunConfig) -> int:
    ex = _extraction(cfg)
    ids = _selected(ex, cfg)
    regions = _regions(cfg)
    try:
        res = query_batch(ex, ids, regions, _distribution(cfg, ex.graph.family.m), cfg.samples, cfg.seed)
    except (ValueError, IndexError) as exc:
        raise ConfigError(str(exc)) from None
    out = _out(cfg)
    write_json(out / "estimates.json", res)
    for e in res["estimates"]:
        parts = [f"ucp {e['ucp']}: total {e['total']['value']:.4f}"]
        parts += [f"R{k} {r['value']:.4f}" for k, r in enumerate(e["regions"])]
        print("  ".join(parts))
    return 0


def _density_records(ex: Extraction, ids, dist, cfg) -> dict:
    grid = ex.graph.grid
    records = []
    for u, d in zip(ids, density_fields(ex, ids, dist, cfg.samples, cfg.seed)):
        rec = {"id": u, "type": ex.ucp(u).ctype.value, "density": d.values.tolist(),
               "vertex_probability": d.vertex_probability.tolist(), "note": d.note}
        records.append(rec)
    data = {"samples": cfg.samples, "seed": cfg.seed, "dim": grid.dim, "ucps": records,
            "vertices": grid.vertices.tolist(), "dual_measure": np.asarray(grid.dual_areas).tolist()}
    if grid.dim == 1:
        data["dual"] = [list(dual_interval(grid, v)) for v in range(grid.n)]
    else:
        data["dual_cells"] = [dual_cell_polygon(grid, v).tolist() for v in range(grid.n)]
        data["triangles"] = grid.cells.tolist()
        data["outlines"] = [{"id": u, "type": ex.ucp(u).ctype.value, "polygons": ex.ucp(u).support.polygons()}
                            for u in ids]
    return data


def render_density(data: dict, interpolate: bool) -> str:
    """SVG from a density export (the ``density.json`` content)."""
    if data["dim"] == 1:
        xs = [v[0] for v in data["vertices"]]
        series = [{"id": r["id"], "type": r["type"], "x": xs, "density": r["density"], "dual": data["dual"]}
                  for r in data["ucps"]]
        return density_plot_1d(series, interpolate=interpolate)
    cells, tris = [], []
    for r in data["ucps"]:
        dens = r["density"]
        cells += [{"type": r["type"], "polygon": data["dual_cells"][v], "value": d}
                  for v, d in enumerate(dens) if d > 0]
        if interpolate:
            for t in data["triangles"]:
                val = sum(dens[v] for v in t) / 3.0
                if val > 0:
                    tris.append({"type": r["type"], "polygon": [data["vertices"][v] for v in t], "value": val})
    return density_plot_2d(cells, data.get("outlines", []), triangles=tris if interpolate else None)


def cmd_density(cfg: RunConfig) -> int:
    out = _out(cfg)
    if cfg.mode == "analytic":
        if cfg.case != "parabola-sine":
            raise ConfigError("analytic mode is available for --case parabola-sine")
        pair = cases.parabola_sine_pair(cfg.x_range or (-7.0, 7.0))
        brs = jacobi_branches(pair)
        dist = _distribution(cfg, 1)
        tab = curve_table(brs, dist)
        bdata = branches_to_dict(brs, dist)
        write_json(out / "branches.json", bdata)
        write_csv(out / "curve.csv", ["branch", "x", "a", "density"],
                  ([int(r[0]), r[1], r[2], r[3]] for r in tab))
        if cfg.svg:
            curves = [{"branch": k, "x": tab[tab[:, 0] == k, 1].tolist(), "density": tab[tab[:, 0] == k, 3].tolist()}
                      for k in range(len(brs))]
            (out / "plot.svg").write_text(branch_plot(bdata["branches"], curves), encoding="utf-8")
        print(f"{len(brs)} analytic branches -> {out / 'branches.json'}")
        return 0

    ex = _extraction(cfg)
    ids = _selected(ex, cfg)
    data = _density_records(ex, ids, _distribution(cfg, ex.graph.family.m), cfg)
    write_json(out / "density.json", data)
    coords = ["x"] if data["dim"] == 1 else ["x", "y"]
    rows = (row for r in data["ucps"] for row in density_rows(ex.graph.grid, r["id"], np.asarray(r["density"])))
    write_csv(out / "density.csv", ["ucp", "vertex", *coords, "density"], rows)
    if cfg.svg:
        (out / "plot.svg").write_text(render_density(data, cfg.interpolate_display), encoding="utf-8")
    print(f"density for {len(ids)} UCPs -> {out / 'density.csv'}")
    return 0


def cmd_eof(cfg: RunConfig) -> int:
    if cfg.ensemble is None or cfg.m is None:
        raise ConfigError("eof needs --ensemble and --m")
    res = _eof(cfg)
    out = _out(cfg)
    write_family(out / "family.json", res.family)
    q = qq_table(res.coefficients)
    header = ["k", "normal_quantile"] + [f"mode{i + 1}" for i in range(res.family.m)]
    write_csv(out / "qq.csv", header, ([int(r[0]), *map(float, r[1:])] for r in q))
    write_json(out / "eof.json", {"explained_variance": res.explained_variance.tolist(),
                                  "singular_values": res.singular_values.tolist(), "notes": res.notes,
                                  "m": res.family.m})
    print(f"m={res.family.m}, explained variance {float(np.sum(res.explained_variance)):.4f}")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.case not in CASES:
        raise ConfigError(f"verify needs --case in {sorted(CASES)}")
    kw = {}
    if cfg.case == "helicoid":
        kw = {"samples": cfg.samples, "seed": cfg.seed}
    elif cfg.case == "parabola-sine" and cfg.x_range:
        kw = {"x_range": cfg.x_range}
    rep = run_case(cfg.case, **kw)
    print(rep.text())
    return 0 if rep.passed else 1


COMMANDS = {
    "extract": cmd_extract,
    "probability": cmd_probability,
    "density": cmd_density,
    "eof": cmd_eof,
    "verify": cmd_verify,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its keys")
    common.add_argument("--grid", help="grid JSON")
    common.add_argument("--family", help="family JSON")
    common.add_argument("--ensemble", help="ensemble CSV, or raw float64 with a <file>.json header")
    common.add_argument("--weights", help="per-vertex EOF weights (CSV)")
    common.add_argument("--case", help=f"built-in input: {', '.join(BUILTIN + ('prop54-random',))}")
    common.add_argument("--resolution", type=int, help="vertex count (1D) or per-axis count (2D) for built-in cases")
    common.add_argument("--x-range", type=float, nargs=2, metavar=("LO", "HI"))
    common.add_argument("--m", type=int, help="number of modes")
    common.add_argument("--dist", help="'standard' or JSON {mean, factor} (inline or file)")
    common.add_argument("--regions", help="JSON list of regions (inline or file)")
    common.add_argument("--ucp", type=int, action="append", help="UCP id (repeatable)")
    common.add_argument("--samples", type=int, help="Monte-Carlo sample count")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--include-boundary", action="store_true", help="keep patches at boundary vertices")
    common.add_argument("--out", help="output directory")
    common.add_argument("--svg", action="store_true", help="also write plot.svg")
    common.add_argument("--interpolate-display", action="store_true", help="smooth display in the SVG")
    common.add_argument("--mode", choices=["pl", "analytic"], help="density: piecewise-linear or closed form")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="uncrit", description="Uncertain critical points of linear field families.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    warnings.simplefilter("default")
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except UncritError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except TypeError as exc:
        # malformed config values
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
