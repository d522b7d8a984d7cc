import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uncrit import lp


def unit_rows(rng, k, m):
    R = rng.standard_normal((k, m))
    return R / np.linalg.norm(R, axis=1, keepdims=True)


def test_max_slack_box():
    R = np.array([[1.0], [-1.0]])
    b = np.array([1.0, 1.0])  # -1 <= a <= 1
    t, a = lp.max_slack(R, b)
    assert t == pytest.approx(1.0) and a[0] == pytest.approx(0.0, abs=1e-9)
    ok, _, _ = lp.strictly_feasible(R, np.array([1.0, -1.0]))  # a >= -1 and a <= -1
    assert not ok


def test_max_slack_infeasible_equality():
    R = np.zeros((0, 2))
    t, a = lp.max_slack(R, np.zeros(0), E=[[1.0, 0.0], [1.0, 0.0]], e=[0.0, 1.0])
    assert t == -np.inf and a is None


def test_interval_helper():
    assert lp._interval([1.0, 1.0], [1.0, -1.0], 0.0) == (-1.0, 1.0)
    assert lp._interval([-1.0, -1.0], [1.0, -1.0], 0.0) is None


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.integers(1, 6), st.booleans())
def test_fast_paths_agree_with_lp(seed, m, k, with_eq):
    rng = np.random.default_rng(seed)
    R = unit_rows(rng, k, m)
    b = rng.normal(scale=0.7, size=k)
    E = e = None
    if with_eq:
        E = unit_rows(rng, 1, m)
        e = rng.normal(size=1)
    fast = lp.weakly_feasible(R, b, E, e)
    t, _ = lp.max_slack(R, b, E, e)
    slow = t >= -lp.EPS_FEAS
    if abs(t) > 1e-6:  # away from the tolerance boundary the answers must match
        assert fast == slow
