"""Closed-form branches of x^2/10 + a sin x next to the piecewise-linear densities.

Writes branches.json, curve.csv, pl_density.csv and two SVG plots into --out.
"""

import argparse
from pathlib import Path

import numpy as np

from uncrit import cases
from uncrit.analytic import branch_probability, curve_table, jacobi_branches
from uncrit.extract import extract
from uncrit.io import branches_to_dict, write_csv, write_json
from uncrit.mesh import dual_interval
from uncrit.patches import build_patch_graph
from uncrit.prob import density_fields
from uncrit.svg import branch_plot, density_plot_1d


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-range", nargs=2, type=float, default=(-7.0, 7.0))
    ap.add_argument("--resolution", type=int, default=281)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("out/parabola_sine"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    brs = jacobi_branches(cases.parabola_sine_pair(tuple(args.x_range)))
    exported = branches_to_dict(brs)
    write_json(args.out / "branches.json", exported)
    rows = curve_table(brs, per_branch=200)
    write_csv(args.out / "curve.csv", ["branch", "x", "a", "density"], rows)
    curves = [{"branch": k, "x": [r[1] for r in rows if r[0] == k], "density": [r[3] for r in rows if r[0] == k]}
              for k in range(len(brs))]
    (args.out / "analytic.svg").write_text(branch_plot(exported["branches"], curves))
    for b in brs:
        print(f"{b.ctype.value:8s} ({b.lo:+.4f}, {b.hi:+.4f})  {b.kind_lo.value}/{b.kind_hi.value}"
              f"  P = {branch_probability(b):.4f}")

    grid, fam = cases.parabola_sine(args.resolution, tuple(args.x_range))
    ex = extract(build_patch_graph(fam, grid))
    fields = density_fields(ex, [u.id for u in ex.ucps], N=args.samples, seed=args.seed)
    xs = grid.vertices[:, 0]
    duals = [list(dual_interval(grid, v)) for v in range(grid.n)]
    series = [{"id": u.id, "type": u.ctype.value, "x": list(xs), "density": list(f.values), "dual": duals}
              for u, f in zip(ex.ucps, fields)]
    write_csv(args.out / "pl_density.csv", ["ucp", "x", "density"],
              [[u.id, float(x), float(d)] for u, f in zip(ex.ucps, fields) for x, d in zip(xs, f.values)])
    (args.out / "pl_density.svg").write_text(density_plot_1d(series, "piecewise-linear density"))
    print(f"{len(ex.ucps)} discrete UCPs; outputs in {args.out}")


if __name__ == "__main__":
    main()
