"""Linear feasibility tests on systems of affine constraints over R^m.

Inequality rows are ``b + R @ a >= slack`` and equality rows ``e + E @ a == 0``;
callers normalize rows to unit ``R``-norm so slack is a Euclidean distance.
Strict feasibility of an open cell is decided by the phase-one program that
maximizes the common slack; weak feasibility (closed cells, shared faces) asks
for slack >= -tol.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .errors import NumericalError

EPS_FEAS = 1e-9
SLACK_CAP = 1.0

_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def max_slack(R, b, E=None, e=None, cap: float = SLACK_CAP) -> tuple[float, np.ndarray | None]:
    """Maximize ``t`` subject to ``b + R a >= t``, ``e + E a = 0``, ``t <= cap``.

    ``R`` must be shaped ``(k, m)`` even when ``k == 0``. Returns ``(t*, a*)``;
    ``(-inf, None)`` when the equalities are infeasible.
    """
    R = np.asarray(R, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    m = R.shape[1]
    k = b.size
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-R, np.ones((k, 1))]) if k else None
    b_ub = b if k else None
    A_eq = b_eq = None
    if E is not None and np.size(E):
        E = np.atleast_2d(np.asarray(E, dtype=float))
        A_eq = np.hstack([E, np.zeros((E.shape[0], 1))])
        b_eq = -np.asarray(e, dtype=float).ravel()
    bounds = [(None, None)] * m + [(None, cap)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                  method="highs", options=_HIGHS)
    if res.status == 2:
        return -np.inf, None
    if res.status != 0:
        raise NumericalError(f"feasibility LP did not converge: {res.message}")
    return float(res.x[-1]), res.x[:-1]


def strictly_feasible(R, b, eps: float = EPS_FEAS) -> tuple[bool, np.ndarray | None, float]:
    t, a = max_slack(R, b)
    return t > eps, a, t


def weakly_feasible(R, b, E=None, e=None, tol: float = EPS_FEAS) -> bool:
    """Closed system ``b + R a >= -tol`` with equalities, any dimension."""
    R = np.asarray(R, dtype=float)
    m = R.shape[1]
    if m == 1:
        return _weak_1d(R, b, E, e, tol)
    if m == 2 and E is not None and np.size(E):
        return _weak_on_line(R, b, np.atleast_2d(E), np.asarray(e, dtype=float).ravel(), tol)
    t, _ = max_slack(R, b, E, e)
    return t >= -tol


def _interval(alpha, beta, tol, lo=-np.inf, hi=np.inf):
    """Intersect ``{t : alpha + beta t >= -tol}`` over rows with ``[lo, hi]``."""
    for al, be in zip(alpha, beta):
        if abs(be) <= 1e-14:
            if al < -tol:
                return None
            continue
        root = (-tol - al) / be
        if be > 0:
            lo = max(lo, root)
        else:
            hi = min(hi, root)
        if lo > hi:
            return None
    return lo, hi


def _weak_1d(R, b, E, e, tol):
    R = R.ravel()
    b = np.asarray(b, dtype=float).ravel()
    if E is not None and np.size(E):
        E = np.asarray(E, dtype=float).ravel()
        e = np.asarray(e, dtype=float).ravel()
        # equalities pin the point; rows are unit-normalized so |E| == 1 unless zero
        alpha = np.concatenate([b, e, -e])
        beta = np.concatenate([R, E, -E])
    else:
        alpha, beta = b, R
    return _interval(alpha, beta, tol) is not None


def _weak_on_line(R, b, E, e, tol):
    n0 = E[0]
    nn = np.linalg.norm(n0)
    if nn == 0:
        return abs(e[0]) <= tol and weakly_feasible(R, b, E[1:] if len(E) > 1 else None, e[1:], tol)
    p0 = -e[0] * n0 / nn**2
    d = np.array([-n0[1], n0[0]]) / nn
    alpha = [np.asarray(b, dtype=float).ravel() + R @ p0]
    beta = [R @ d]
    for row, off in zip(E[1:], e[1:]):
        al, be = off + row @ p0, row @ d
        alpha.append(np.array([al, -al]))
        beta.append(np.array([be, -be]))
    return _interval(np.concatenate(alpha), np.concatenate(beta), tol) is not None
