"""Helicoid family: one uncertain maximum that appears once per period in every realization."""

import argparse

import numpy as np

from uncrit import cases
from uncrit.analytic import helicoid_region_probability
from uncrit.extract import extract
from uncrit.patches import build_patch_graph
from uncrit.pltopo import Tag
from uncrit.prob import Region, joint_probability, multi_manifestation, region_probability


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    grid, fam = cases.helicoid()
    ex = extract(build_patch_graph(fam, grid))
    print(f"{len(ex.ucps)} uncertain critical points: {[u.ctype.value for u in ex.ucps]}")
    mx = next(u.id for u in ex.ucps if u.ctype is Tag.MAXIMUM)

    period = 2 * np.pi
    for lo, hi in [(0, period), (period, 2 * period), (0, np.pi), (period, 3 * np.pi), (np.pi, period)]:
        p = region_probability(ex, mx, Region.of_intervals([(lo, hi)]), N=args.samples, seed=args.seed)
        exact = helicoid_region_probability((lo, hi))
        print(f"P(max in [{lo:.3f}, {hi:.3f})) = {p.value:.4f} +- {p.stderr:.4f}   closed form {exact:.4f}")

    halves = [Region.of_intervals([(0, np.pi)]), Region.of_intervals([(np.pi, period)])]
    j = joint_probability(ex, mx, *halves, N=args.samples, seed=args.seed)
    print(f"P([0, pi)) + P([pi, 2pi)) = {j.first.value + j.second.value:.4f}, union {j.union.value:.4f}")
    whole = [Region.of_intervals([(0, period)]), Region.of_intervals([(period, 2 * period)])]
    j = joint_probability(ex, mx, *whole, N=args.samples, seed=args.seed)
    print(f"joint over two periods {j.joint.value:.4f}; sum of marginals {j.first.value + j.second.value:.4f}")
    d = multi_manifestation(ex, mx, N=args.samples, seed=args.seed)
    print(f"fraction of realizations with the maximum at >= 2 vertices: {d.value:.4f}")


if __name__ == "__main__":
    main()
