"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` to see the lines. Criteria whose
target is known to be unreachable stay faithful and are marked ``xfail``
(strict), so they report red without breaking the suite; see README.
"""

import time

import numpy as np
import pytest
from scipy.integrate import quad

from uncrit import cases
from uncrit.analytic import branch_density, branch_probability, jacobi_branches
from uncrit.family import LinearFamily, eof_decompose, evaluate
from uncrit.io import components_to_dict, dumps, patch_graph_to_dict
from uncrit.mesh import build_line_grid, delaunay_grid, structured_triangle_grid
from uncrit.patches import build_patch_graph, enumerate_patches, is_adjacent
from uncrit.extract import extract
from uncrit.pltopo import Tag, classify_values
from uncrit.prob import Region, density_fields, joint_probability, multi_manifestation, region_probability
from uncrit.verify import verify_prop54_random

TWO_PI = 2 * np.pi


@pytest.fixture
def verdict(capsys):
    def report(k: int, title: str, results: list[tuple[str, bool]]):
        ok = all(r for _, r in results)
        detail = "; ".join(f"{'' if r else '!'}{d}" for d, r in results)
        with capsys.disabled():
            print(f"\nCRITERION {k} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
        assert ok, detail
    return report


def _hausdorff(P: np.ndarray, Q: np.ndarray) -> float:
    def one_sided(X, Y):
        Y = np.sort(Y)
        i = np.clip(np.searchsorted(Y, X), 1, len(Y) - 1)
        return float(np.minimum(np.abs(X - Y[i - 1]), np.abs(X - Y[i])).max())
    return max(one_sided(P, Q), one_sided(Q, P))


def _sample_intervals(intervals, step=1e-3) -> np.ndarray:
    return np.concatenate([np.append(np.arange(lo, hi, step), hi) for lo, hi in intervals])


def test_criterion_1_helicoid(verdict):
    N, seed = 20_000, 0
    t0 = time.perf_counter()
    grid, fam = cases.helicoid(601, 6 * np.pi)
    ex = extract(build_patch_graph(fam, grid, include_boundary=False))
    tags = sorted(u.ctype.value for u in ex.ucps)
    out = [(f"UCPs {tags}", tags == ["maximum", "minimum"])]
    mx = next(u.id for u in ex.ucps if u.ctype is Tag.MAXIMUM)
    for k in range(3):
        p = region_probability(ex, mx, Region.of_intervals([(TWO_PI * k, TWO_PI * (k + 1))]), N=N, seed=seed)
        out.append((f"P[{2 * k}pi,{2 * k + 2}pi)={p.value:.4f}", abs(p.value - 1) <= 0.01))
    j = joint_probability(ex, mx, Region.of_intervals([(0, TWO_PI)]), Region.of_intervals([(TWO_PI, 2 * TWO_PI)]),
                          N=N, seed=seed)
    out.append((f"joint={j.joint.value:.4f}", abs(j.joint.value - 1) <= 0.01))
    p = region_probability(ex, mx, Region.of_intervals([(0, np.pi)]), N=N, seed=seed)
    out.append((f"P[0,pi)={p.value:.4f}", abs(p.value - 0.5) <= 0.02))
    dt = time.perf_counter() - t0
    out.append((f"runtime {dt:.1f}s", dt < 30))
    verdict(1, "helicoid", out)


def test_criterion_2_double_manifestation(verdict, helicoid_extraction):
    ex = helicoid_extraction
    mx = next(u.id for u in ex.ucps if u.ctype is Tag.MAXIMUM)
    d = multi_manifestation(ex, mx, N=20_000, seed=2)
    verdict(2, "same maximum at >=2 vertices", [(f"fraction={d.value:.4f}", abs(d.value - 1) <= 0.01)])


@pytest.mark.xfail(strict=True, reason="the closed-form curve has 9 constant-type branches on [-7, 7], not 5")
def test_criterion_3_parabola_sine_analytic(verdict):
    brs = jacobi_branches(cases.parabola_sine_pair((-7.0, 7.0)))
    nmin = sum(b.ctype is Tag.MINIMUM for b in brs)
    nmax = sum(b.ctype is Tag.MAXIMUM for b in brs)
    out = [(f"{len(brs)} branches ({nmin} min, {nmax} max)", (len(brs), nmin, nmax) == (5, 3, 2))]
    centre = next(b for b in brs if b.contains(0.0))
    out.append((f"centre ({centre.lo:.4f},{centre.hi:.4f}) {centre.ctype.value}",
                centre.ctype is Tag.MINIMUM and abs(centre.lo + np.pi / 2) < 1e-9 and abs(centre.hi - np.pi / 2) < 1e-9))
    p = branch_probability(centre)
    out.append((f"P(centre)={p:.12f}", abs(p - 1) <= 1e-12))
    d0, d1 = branch_density(centre, None, 0.0), branch_density(centre, None, 1.4)
    out.append((f"density(0)={d0:.5f}", abs(d0 / 0.0798 - 1) <= 0.01))
    out.append((f"density(1.4)={d1:.5f}", abs(d1 / 1.10 - 1) <= 0.01 and d1 > d0))
    worst = 0.0
    for b in brs:
        q, _ = quad(lambda x: branch_density(b, None, x), b.lo, b.hi, epsabs=1e-10, epsrel=1e-10, limit=400)
        worst = max(worst, abs(q - branch_probability(b)))
    out.append((f"max quadrature error {worst:.1e}", worst <= 1e-6))
    verdict(3, "parabola-sine analytic", out)


def test_criterion_4_discrete_to_analytic_convergence(verdict):
    N, seed = 20_000, 1
    brs = jacobi_branches(cases.parabola_sine_pair((-7.0, 7.0)))
    out, runs = [], []
    for n in (281, 561):
        grid, fam = cases.parabola_sine(n, (-7.0, 7.0))
        h = 14.0 / (n - 1)
        ex = extract(build_patch_graph(fam, grid))
        types_match = [u.ctype for u in ex.ucps] == [b.ctype for b in brs]
        out.append((f"h={h:.3f}: {len(ex.ucps)} UCPs aligned with {len(brs)} branches", types_match))
        if not types_match:
            break
        worst_h = worst_p = 0.0
        ok_p = True
        for u, b in zip(ex.ucps, brs):
            worst_h = max(worst_h, _hausdorff(_sample_intervals(u.support.intervals), _sample_intervals([(b.lo, b.hi)])))
            est = region_probability(ex, u.id, Region.of_intervals([(-8.0, 8.0)]), N=N, seed=seed)
            gap = abs(est.value - branch_probability(b))
            worst_p = max(worst_p, gap)
            ok_p &= gap <= max(3 * est.stderr, 0.02)
        out.append((f"h={h:.3f}: Hausdorff {worst_h:.3f} <= {2 * h:.3f}", worst_h <= 2 * h))
        out.append((f"h={h:.3f}: max |P - P_branch| {worst_p:.4f}", ok_p))
        runs.append((grid, h, density_fields(ex, [u.id for u in ex.ucps], N=N, seed=seed)))

    if len(runs) == 2:
        (gc, hc, fc), (_, _, ff) = runs
        xc = gc.vertices[:, 0]
        worst, ratios = 0.0, []
        for b, Fc, Ff in zip(brs, fc, ff):
            for i, x in enumerate(xc):
                if not b.lo + 4 * hc < x < b.hi - 4 * hc:
                    continue
                dc, df = Fc.values[i], Ff.values[2 * i]  # coarse vertex i is fine vertex 2i
                pc, pf = Fc.vertex_probability[i], Ff.vertex_probability[2 * i]
                noise = 3 * np.hypot(np.sqrt(pc * (1 - pc) / N) / Fc.dual_areas[i],
                                     np.sqrt(pf * (1 - pf) / N) / Ff.dual_areas[2 * i])
                xs = np.linspace(max(b.lo + 1e-9, x - hc), min(b.hi - 1e-9, x + hc), 21)
                dd = np.array([branch_density(b, None, t) for t in xs])
                lipschitz = float(np.max(np.abs(np.diff(dd) / np.diff(xs))))
                worst = max(worst, abs(dc - df) / (noise + lipschitz * hc))
                if dc > 0.05:
                    ratios.append(df / dc)
        med = float(np.median(ratios))
        out.append((f"density change / (noise + L h) max {worst:.2f}", worst <= 1.0))
        out.append((f"median fine/coarse density {med:.3f}", abs(med - 1) <= 0.05))
    verdict(4, "discrete-analytic convergence", out)


@pytest.mark.xfail(strict=True, reason="piecewise-linear saddles on 2D grids repeat parameter ranges at adjacent vertices")
def test_criterion_5_overlap_free_projection(verdict):
    rep = verify_prop54_random(families=50, samples=10_000, seed=54)
    verdict(5, "overlap-free projection suite", [(f"{c.name.strip()}={c.measured}", c.passed) for c in rep.checks])


def test_criterion_6_classification_oracle(verdict):
    rng = np.random.default_rng(6)
    agree = total = 0
    for _ in range(1000):
        if rng.random() < 0.3:
            n = int(rng.integers(5, 40))
            grid = build_line_grid(np.cumsum(rng.uniform(0.1, 1.0, n)))
        elif rng.random() < 0.5:
            grid = structured_triangle_grid(int(rng.integers(3, 7)), int(rng.integers(3, 7)))
        else:
            grid = delaunay_grid(rng.uniform(0, 1, (int(rng.integers(8, 40)), 2)))
        m = int(rng.integers(1, 4))
        fam = LinearFamily(rng.standard_normal((m + 1, grid.n)))
        v = int(rng.integers(grid.n))
        a = rng.standard_normal(m) * 2
        patch = enumerate_patches(fam, grid, v)[0].arr.locate(a)
        total += 1
        agree += patch is not None and patch.ctype == classify_values(grid.links[v], evaluate(fam, a))
    verdict(6, "patch type vs direct classification", [(f"{agree}/{total} agree", agree == total)])


def test_criterion_7_eof_round_trip(verdict):
    grid = structured_triangle_grid(9, 9, (-1, 1), (-1, 1))
    X = cases.two_mode_ensemble(grid, members=200)
    full = eof_decompose(X, min(X.shape[0] - 1, X.shape[1]))
    recon = full.family.g[0] + full.coefficients @ full.family.g[1:]
    err = float(np.abs(recon - X).max())
    span = float(X.max() - X.min())
    var = full.coefficients.var(axis=0, ddof=1)
    out = [(f"reconstruction error {err:.1e} (range {span:.2f})", err <= 1e-9 * span),
           (f"coefficient variance in [{var.min():.12f}, {var.max():.12f}]", np.all(np.abs(var - 1) <= 1e-9))]
    two = eof_decompose(X, 2).family
    outputs = []
    for _ in range(2):
        ex = extract(build_patch_graph(two, grid))
        outputs.append(dumps(components_to_dict(ex)) + dumps(patch_graph_to_dict(ex.graph)))
    out.append((f"{len(ex.ucps)} UCPs, byte-identical reruns", outputs[0] == outputs[1]))
    verdict(7, "EOF round trip and determinism", out)


def test_criterion_8_arrangement_count(verdict):
    rng = np.random.default_rng(8)
    grid = structured_triangle_grid(5, 5)
    centre = 12
    assert len(grid.links[centre].ring) == 6
    fam = LinearFamily(rng.standard_normal((3, grid.n)))
    count = len(enumerate_patches(fam, grid, centre))
    pats = {v: enumerate_patches(fam, grid, v) for v in range(grid.n)}
    pairs = asym = 0
    for v in range(grid.n):
        for w in (v,) + grid.neighbor_lists[v]:
            for p in pats[v]:
                for q in pats[w]:
                    if p is not q:
                        pairs += 1
                        asym += is_adjacent(p, q)[0] != is_adjacent(q, p)[0]
    verdict(8, "arrangement count and adjacency symmetry",
            [(f"{count} patches (expected 22)", count == 22), (f"{asym} asymmetric of {pairs} pairs", asym == 0)])
