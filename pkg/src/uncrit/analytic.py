"""Exact treatment of 1D one-parameter families ``f_a = g0 + a g1``.

Critical points satisfy ``a(x) = -g0'(x) / g1'(x)``. The curve is cut at poles
(roots of ``g1'``) and at degenerate points (roots of ``a'``, where the second
derivative of the realization vanishes); each piece in between is a branch of
constant critical type whose spatial density is ``|phi(a(x)) a'(x)|``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateFamilyError, NumericalError
from .family import ParameterDistribution
from .pltopo import Tag

log = logging.getLogger(__name__)

__all__ = [
    "SmoothPair",
    "BreakKind",
    "AnalyticBranch",
    "DegenerateCurveError",
    "jacobi_branches",
    "branch_density",
    "branch_probability",
    "helicoid_region_probability",
    "curve_table",
]

Triple = tuple[Callable, Callable, Callable]
ROOT_XTOL = 1e-12
STANDARD_NORMAL = ParameterDistribution(1)


class DegenerateCurveError(DegenerateFamilyError):
    """``a'`` vanishes identically: the critical curve carries no branches."""


@dataclass(frozen=True)
class SmoothPair:
    g0: Triple
    g1: Triple
    domain: tuple[float, float]

    def a(self, x):
        return -self.g0[1](x) / self.g1[1](x)

    def da(self, x):
        return -self.numerator(x) / self.g1[1](x) ** 2

    def numerator(self, x):
        """``g0'' g1' - g0' g1''``; zero exactly where ``a'`` is."""
        return self.g0[2](x) * self.g1[1](x) - self.g0[1](x) * self.g1[2](x)

    def hessian(self, x, a):
        return self.g0[2](x) + a * self.g1[2](x)

    def derivative_error(self, xs, h: float = 1e-5) -> float:
        """Worst relative mismatch of the supplied derivatives vs centered differences."""
        xs = np.asarray(xs, dtype=float)
        worst = 0.0
        for g in (self.g0, self.g1):
            for k in (0, 1):
                fd = (g[k](xs + h) - g[k](xs - h)) / (2 * h)
                ex = g[k + 1](xs)
                worst = max(worst, float(np.max(np.abs(fd - ex) / np.maximum(1.0, np.abs(ex)))))
        return worst


class BreakKind(str, Enum):
    POLE = "pole"
    DEGENERATE = "degenerate"
    DOMAIN_END = "domain-end"


@dataclass(frozen=True)
class AnalyticBranch:
    lo: float
    hi: float
    kind_lo: BreakKind
    kind_hi: BreakKind
    ctype: Tag
    pair: SmoothPair

    @property
    def interval(self) -> tuple[float, float]:
        return self.lo, self.hi

    def a(self, x):
        return self.pair.a(x)

    def da(self, x):
        return self.pair.da(x)

    def contains(self, x) -> bool:
        return self.lo < x < self.hi

    def increasing(self) -> bool:
        return bool(self.da(0.5 * (self.lo + self.hi)) > 0)

    def a_limits(self) -> tuple[float, float]:
        """Values of ``a`` at the left and right ends, infinite at poles."""
        inc = self.increasing()
        left = (-np.inf if inc else np.inf) if self.kind_lo is BreakKind.POLE else float(self.a(self.lo))
        right = (np.inf if inc else -np.inf) if self.kind_hi is BreakKind.POLE else float(self.a(self.hi))
        return left, right


def _roots(fn, xs: np.ndarray) -> tuple[list[float], list[float]]:
    """Simple roots by sign change + Brent; also grid points where fn is exactly 0.

    Second list: suspected double roots (touching zero without a sign change).
    """
    vals = fn(xs)
    roots = []
    for k in np.flatnonzero(vals == 0):
        roots.append(float(xs[k]))
    change = np.flatnonzero(vals[:-1] * vals[1:] < 0)
    for k in change:
        roots.append(float(brentq(fn, xs[k], xs[k + 1], xtol=ROOT_XTOL)))
    scale = float(np.max(np.abs(vals))) or 1.0
    a = np.abs(vals)
    dips = np.flatnonzero((a[1:-1] < a[:-2]) & (a[1:-1] < a[2:]) & (a[1:-1] < 1e-6 * scale)
                          & (vals[:-2] * vals[2:] > 0)) + 1
    return sorted(roots), [float(xs[k]) for k in dips]


def jacobi_branches(pair: SmoothPair, grid_resolution: int = 10_000) -> list[AnalyticBranch]:
    lo, hi = map(float, pair.domain)
    if not hi > lo:
        raise ValueError("empty domain")
    xs = np.linspace(lo, hi, grid_resolution)
    d1 = pair.g1[1](xs)
    if np.max(np.abs(d1)) <= 1e-14:
        raise DegenerateFamilyError("g1' vanishes on the domain: criticality does not depend on a")
    num = pair.numerator(xs)
    if np.max(np.abs(num)) <= 1e-12 * max(1.0, float(np.max(np.abs(pair.g0[1](xs))) + np.max(np.abs(d1)))):
        raise DegenerateCurveError("a'(x) vanishes identically: every critical point is degenerate")

    poles, pole_dips = _roots(pair.g1[1], xs)
    degens, degen_dips = _roots(pair.numerator, xs)
    for x in pole_dips + degen_dips:
        log.warning("possible double root near x=%.6g: the family is degenerate there", x)
    degens = [x for x in degens if all(abs(x - p) > 1e-9 for p in poles)]

    cuts = [(lo, BreakKind.DOMAIN_END)]
    cuts += sorted([(x, BreakKind.POLE) for x in poles] + [(x, BreakKind.DEGENERATE) for x in degens])
    cuts.append((hi, BreakKind.DOMAIN_END))
    # roots landing exactly on the domain ends replace the end marker
    while len(cuts) > 2 and cuts[1][0] <= lo:
        cuts.pop(0)
    while len(cuts) > 2 and cuts[-2][0] >= hi:
        cuts.pop()

    branches = []
    for (x0, k0), (x1, k1) in zip(cuts[:-1], cuts[1:]):
        if not x1 > x0:
            continue
        mid = 0.5 * (x0 + x1)
        h = pair.hessian(mid, pair.a(mid))
        if h == 0:
            raise NumericalError(f"type undetermined on ({x0:.6g}, {x1:.6g})")
        tag = Tag.MINIMUM if h > 0 else Tag.MAXIMUM
        probe = np.linspace(x0, x1, 18)[1:-1]
        hs = pair.hessian(probe, pair.a(probe))
        if np.any(np.sign(hs) != np.sign(h)):
            raise NumericalError(f"critical type changes inside ({x0:.6g}, {x1:.6g}); missed a degenerate point")
        branches.append(AnalyticBranch(x0, x1, k0, k1, tag, pair))
    return branches


def branch_density(branch: AnalyticBranch, dist: ParameterDistribution | None, x) -> float:
    if not branch.contains(x):
        raise ValueError(f"x={x} outside branch ({branch.lo}, {branch.hi})")
    dist = dist or STANDARD_NORMAL
    return float(abs(dist.pdf1(branch.a(x)) * branch.da(x)))


def branch_probability(branch: AnalyticBranch, dist: ParameterDistribution | None = None) -> float:
    if not branch.hi > branch.lo:
        return 0.0
    dist = dist or STANDARD_NORMAL
    left, right = branch.a_limits()
    return float(abs(dist.cdf1(right) - dist.cdf1(left)))


def helicoid_region_probability(interval, ctype: Tag = Tag.MAXIMUM,
                                dist: ParameterDistribution | None = None) -> float:
    """Probability that the helicoid's uncertain extremum manifests in ``[x0, x1]``.

    The phase of ``(a1, a2)`` is uniform for rotationally symmetric laws, and the
    extremum sits at ``x = phase (mod 2 pi)`` (shifted by ``pi`` for the minimum),
    so the answer is the covered fraction of one period.
    """
    x0, x1 = map(float, interval)
    if not x1 > x0:
        raise ValueError("interval must have x1 > x0")
    if ctype not in (Tag.MAXIMUM, Tag.MINIMUM):
        raise ValueError("the helicoid has only maxima and minima")
    if dist is not None and (dist.m != 2 or not dist.is_isotropic()):
        raise ValueError("closed form needs a rotationally symmetric 2D law; use Monte Carlo")
    return min(1.0, (x1 - x0) / (2 * np.pi))


def curve_table(branches: list[AnalyticBranch], dist: ParameterDistribution | None = None,
                per_branch: int = 200) -> np.ndarray:
    """Rows ``(branch index, x, a(x), density)`` sampled inside every branch."""
    rows = []
    for k, br in enumerate(branches):
        xs = np.linspace(br.lo, br.hi, per_branch + 2)[1:-1]
        for x in xs:
            rows.append((k, x, float(br.a(x)), branch_density(br, dist, x)))
    return np.array(rows).reshape(-1, 4)
