"""End-to-end scenario checks with measured vs expected values."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import cases
from .analytic import branch_density, branch_probability, jacobi_branches
from .extract import Extraction, code_of, extract, sign_codes
from .family import ParameterDistribution, sample_parameters
from .mesh import Grid, build_line_grid, delaunay_grid
from .patches import build_patch_graph
from .pltopo import Tag
from .prob import Region, joint_probability, multi_manifestation, region_probability

__all__ = ["Check", "Report", "CASES", "run_case", "verify_helicoid", "verify_parabola_sine",
           "verify_prop54_random", "overlap_violations", "partition_misses"]


@dataclass(frozen=True)
class Check:
    name: str
    measured: str
    expected: str
    passed: bool

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.measured} (expected {self.expected})"


@dataclass
class Report:
    case: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name, measured, expected, passed) -> None:
        self.checks.append(Check(name, measured, expected, bool(passed)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        lines = [f"case {self.case}"] + ["  " + c.line() for c in self.checks]
        lines.append(f"  => {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def verify_helicoid(samples: int = 20_000, seed: int = 0) -> Report:
    rep = Report("helicoid")
    t0 = time.perf_counter()
    grid, fam = cases.helicoid()
    ex = extract(build_patch_graph(fam, grid))
    tags = [u.ctype for u in ex.ucps]
    rep.add("UCP count", len(ex.ucps), 2, len(ex.ucps) == 2)
    rep.add("maxima/minima", f"{tags.count(Tag.MAXIMUM)}/{tags.count(Tag.MINIMUM)}", "1/1",
            tags.count(Tag.MAXIMUM) == 1 and tags.count(Tag.MINIMUM) == 1)
    if Tag.MAXIMUM not in tags:
        return rep
    mx = next(u.id for u in ex.ucps if u.ctype is Tag.MAXIMUM)
    two_pi = 2 * np.pi
    for k in range(3):
        p = region_probability(ex, mx, Region.of_intervals([(two_pi * k, two_pi * (k + 1))]), N=samples, seed=seed)
        rep.add(f"P[{2 * k}pi,{2 * k + 2}pi)", f"{p.value:.4f}", "1+-0.01", abs(p.value - 1) <= 0.01)
    j = joint_probability(ex, mx, Region.of_intervals([(0, two_pi)]), Region.of_intervals([(two_pi, 2 * two_pi)]),
                          N=samples, seed=seed)
    rep.add("joint P[0,2pi) & [2pi,4pi)", f"{j.joint.value:.4f}", "1+-0.01", abs(j.joint.value - 1) <= 0.01)
    p = region_probability(ex, mx, Region.of_intervals([(0, np.pi)]), N=samples, seed=seed)
    rep.add("P[0,pi)", f"{p.value:.4f}", "0.5+-0.02", abs(p.value - 0.5) <= 0.02)
    d = multi_manifestation(ex, mx, N=samples, seed=seed)
    rep.add("same max at >=2 vertices", f"{d.value:.4f}", "1+-0.01", abs(d.value - 1) <= 0.01)
    dt = time.perf_counter() - t0
    rep.add("runtime", f"{dt:.1f}s", "<30s", dt < 30)
    return rep


def verify_parabola_sine(x_range=(-7.0, 7.0)) -> Report:
    rep = Report(f"parabola-sine on [{x_range[0]:g}, {x_range[1]:g}]")
    pair = cases.parabola_sine_pair(x_range)
    brs = jacobi_branches(pair)
    nmin = sum(b.ctype is Tag.MINIMUM for b in brs)
    nmax = len(brs) - nmin
    rep.add("branch count", len(brs), 5, len(brs) == 5)
    rep.add("minima/maxima", f"{nmin}/{nmax}", "3/2", (nmin, nmax) == (3, 2))
    centre = next((b for b in brs if b.contains(0.0)), None)
    if centre is not None:
        p = branch_probability(centre)
        rep.add("centre branch probability", f"{p:.12f}", "1", abs(p - 1) <= 1e-12)
        d0, d1 = branch_density(centre, None, 0.0), branch_density(centre, None, 1.4)
        rep.add("density(0)", f"{d0:.5f}", "0.0798 +-1%", abs(d0 / 0.0798 - 1) <= 0.01)
        rep.add("density(1.4)", f"{d1:.5f}", "1.10 +-1%", abs(d1 / 1.10 - 1) <= 0.01)
        rep.add("density(1.4) > density(0)", f"{d1:.4f} > {d0:.4f}", "true", d1 > d0)
    worst = 0.0
    for b in brs:
        q, _ = quad(lambda x: branch_density(b, None, x), b.lo, b.hi, epsabs=1e-10, epsrel=1e-10, limit=400)
        worst = max(worst, abs(q - branch_probability(b)))
    rep.add("max |quadrature - |dPhi||", f"{worst:.2e}", "<=1e-6", worst <= 1e-6)
    return rep


def overlap_violations(ex: Extraction, tol: float = 1e-9, types=None) -> int:
    """Pairs of member patches at distinct vertices whose open a-intervals overlap (m = 1).

    ``types`` restricts the count to UCPs of the given tags.
    """
    bad = 0
    for u in ex.ucps:
        if types is not None and u.ctype not in types:
            continue
        spans = [(ex.graph.nodes[k].vertex, ex.graph.nodes[k].interval) for k in u.patch_ids]
        for s in range(len(spans)):
            for t in range(s + 1, len(spans)):
                (v1, (a1, b1)), (v2, (a2, b2)) = spans[s], spans[t]
                if v1 != v2 and min(b1, b2) - max(a1, a2) > tol:
                    bad += 1
    return bad


def partition_misses(ex: Extraction, A: np.ndarray) -> int:
    """Sample/vertex pairs that match no patch, or more than one, at that vertex."""
    misses = 0
    for arr in ex.graph.arrangements:
        codes = np.array(sorted(code_of(p.sign_vector) for p in arr.patches))
        if len(np.unique(codes)) != len(codes):
            misses += len(A)
            continue
        got = sign_codes(arr, A) if arr.constraints else np.zeros(len(A), dtype=np.int64)
        misses += int((~np.isin(got, codes)).sum())
    return misses


def _random_grid(rng: np.random.Generator) -> Grid:
    if rng.random() < 0.5:
        n = int(rng.integers(10, 200))
        return build_line_grid(np.sort(rng.uniform(0, 10, n)) + np.arange(n) * 1e-6)
    n = int(rng.integers(20, 200))
    return delaunay_grid(rng.uniform(0, 1, (n, 2)))


def verify_prop54_random(families: int = 50, samples: int = 10_000, seed: int = 54) -> Report:
    rep = Report("prop54-random")
    rng = np.random.default_rng(seed)
    overlaps = extrema = line = misses = 0
    A = sample_parameters(ParameterDistribution(1), samples, seed)
    for _ in range(families):
        grid = _random_grid(rng)
        fam = cases.random_family(grid, 1, rng)
        ex = extract(build_patch_graph(fam, grid, include_boundary=bool(rng.random() < 0.5)))
        k = overlap_violations(ex)
        overlaps += k
        extrema += overlap_violations(ex, types=(Tag.MINIMUM, Tag.MAXIMUM))
        line += k if grid.dim == 1 else 0
        misses += partition_misses(ex, A)
    rep.add(f"overlap violations over {families} families", overlaps, 0, overlaps == 0)
    rep.add("  of which on minima/maxima", extrema, 0, extrema == 0)
    rep.add("  of which on 1D grids", line, 0, line == 0)
    rep.add(f"partition misses over {samples} samples", misses, 0, misses == 0)
    return rep


CASES = {
    "helicoid": verify_helicoid,
    "parabola-sine": verify_parabola_sine,
    "prop54-random": verify_prop54_random,
}


def run_case(name: str, **kwargs) -> Report:
    return CASES[name](**kwargs)
