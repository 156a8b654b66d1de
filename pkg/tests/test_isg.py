"""Tests for the integer-set reduction (lower-corner computation)."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fendec.isg import reduce_integer_set
from fendec.lp import LpProblem, LpStatus, solve


def test_single_row_corner():
    # frozen fixture: one knapsack row, fractional vertex (3, 2.2)
    t = reduce_integer_set(W=[[0.4, 1.0]], tau=[3.4], u=[3, 3], y_hat=[3.0, 2.2])
    assert t.axis_order == [0, 1]
    assert t.binding_rows == [0]
    assert np.array_equal(t.start, [3.0, 2.0])
    assert np.array_equal(t.final, [1.0, 2.0])
    rules = [(s.rule, s.pair) for s in t.steps]
    assert rules == [("ratio-first", (0, 1)), ("ratio-first", (0, 1))]
    assert t.steps[0].value == pytest.approx(0.2, abs=1e-9)
    assert t.steps[1].value == pytest.approx(0.6, abs=1e-9)
    # the next ratio evaluates to 1.0 and must not fire despite rounding noise
    t2 = reduce_integer_set(W=[[0.4, 1.0]], tau=[3.4], u=[3, 3], y_hat=[3.0, 2.2], probe=False)
    assert np.array_equal(t2.final, [1.0, 2.0])


def test_two_row_corner():
    # frozen fixture: mirrored rows, symmetric fractional vertex
    W = [[0.4, 1.0], [1.0, 0.4]]
    v = 17 / 7
    t = reduce_integer_set(W=W, tau=[3.4, 3.4], u=[3, 3], y_hat=[v, v])
    assert t.axis_order == [0, 1]  # total binding weights tie at 1.4, index breaks it
    assert sorted(t.binding_rows) == [0, 1]
    assert np.array_equal(t.final, [1.0, 2.0])
    t2 = reduce_integer_set(W=W, tau=[3.4, 3.4], u=[3, 3], y_hat=[v, v], probe=False)
    assert np.array_equal(t2.final, [1.0, 2.0])


def test_weighted_row_corner_probe_matters():
    # frozen fixture: the probe digs two units deeper than the ratio test alone
    kw = dict(W=[[6.0, 5.0]], tau=[37.4], u=[5, 5], y_hat=[5.0, 1.48])
    ratio_only = reduce_integer_set(probe=False, **kw)
    assert ratio_only.axis_order == [1, 0]
    assert np.array_equal(ratio_only.final, [4.0, 0.0])
    rules = [(s.rule, s.pair) for s in ratio_only.steps]
    assert rules == [("ratio-first", (1, 0)), ("ratio-second", (1, 0))]

    full = reduce_integer_set(probe=True, **kw)
    assert np.array_equal(full.final, [2.0, 0.0])
    probe_steps = [s for s in full.steps if s.rule == "probe"]
    assert [tuple(s.point) for s in probe_steps] == [(3.0, 0.0), (2.0, 0.0)]


def test_interior_point_is_left_alone():
    t = reduce_integer_set(W=[[1.0, 1.0]], tau=[10.0], u=[4, 4], y_hat=[1.3, 1.7])
    assert t.binding_rows == []
    assert np.array_equal(t.final, [1.0, 1.0])
    assert t.steps == []


def test_rejects_negative_matrix():
    with pytest.raises(ValueError):
        reduce_integer_set(W=[[-1.0, 2.0]], tau=[3.0], u=[2, 2], y_hat=[0.5, 0.5])


def test_describe_mentions_corner():
    t = reduce_integer_set(W=[[0.4, 1.0]], tau=[3.4], u=[3, 3], y_hat=[3.0, 2.2])
    text = t.describe()
    assert "lower corner" in text and "[1, 2]" in text


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_corner_feasible_and_below_floor(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    m = int(rng.integers(1, 4))
    W = rng.uniform(0.0, 4.0, (m, n))
    W[rng.uniform(size=W.shape) < 0.2] = 0.0
    u = rng.integers(1, 7, n).astype(float)
    tau = W @ (u * rng.uniform(0.2, 0.9, n)) + rng.uniform(0.0, 1.0, m)
    q = rng.uniform(1.0, 10.0, n)
    rel = solve(LpProblem(objective=q, rows=W, rhs=tau, lower=np.zeros(n), upper=u))
    assert rel.status is LpStatus.OPTIMAL
    y_hat = rel.x
    for probe in (False, True):
        t = reduce_integer_set(W=W, tau=tau, u=u, y_hat=y_hat, probe=probe)
        corner = t.final
        assert (corner >= -1e-12).all()
        assert (corner <= np.floor(y_hat + 1e-9) + 1e-12).all()
        # the corner itself is feasible, so the restricted lattice is nonempty
        assert (W @ corner <= tau + 1e-6).all()
        assert (corner <= u + 1e-12).all()
