"""Tests for Fenchel cut generation against small frozen regions."""

import numpy as np
import pytest

from fendec.fcg import _validate_cut, FenchelCut, generate_cut
from fendec.isg import reduce_integer_set
from fendec.mip import enumerate_lattice

# fixture 1: one knapsack row, LP vertex (3, 2.2), reduced corner (1, 2)
W1, TAU1, U1, YHAT1 = [[0.4, 1.0]], [3.4], [3.0, 3.0], [3.0, 2.2]
# fixture 3: heavier weights, provided fractional point, full corner (2, 0)
W3, TAU3, U3, YHAT3 = [[6.0, 5.0]], [37.4], [5.0, 5.0], [5.0, 1.48]


def test_reduced_lattice_has_expected_points():
    corner = reduce_integer_set(W1, TAU1, U1, YHAT1).final
    pts = enumerate_lattice(W1, TAU1, corner, U1)
    got = sorted(map(tuple, pts.astype(int)))
    assert got == [(1, 2), (1, 3), (2, 2), (3, 2)]


def test_cut_separates_fractional_vertex():
    corner = reduce_integer_set(W1, TAU1, U1, YHAT1).final
    res = generate_cut(W1, TAU1, U1, YHAT1, corner=corner, validate=True)
    assert res.cut is not None
    cut = res.cut
    assert cut.violation == pytest.approx(0.2, abs=1e-6)
    assert float(cut.beta @ YHAT1) > cut.rhs + 1e-6
    # valid for every point of the full region, not just the reduced one
    pts = enumerate_lattice(W1, TAU1, [0, 0], U1)
    assert (pts @ cut.beta <= cut.rhs + 1e-7).all()


def test_cut_without_reduction_also_separates():
    res = generate_cut(W1, TAU1, U1, YHAT1, corner=None, validate=True)
    assert res.cut is not None
    assert res.cut.violation == pytest.approx(0.2, abs=1e-6)


def test_bounds_trace_is_a_sandwich():
    corner = reduce_integer_set(W1, TAU1, U1, YHAT1).final
    res = generate_cut(W1, TAU1, U1, YHAT1, corner=corner)
    tr = np.array(res.bounds_trace)
    lows, highs = tr[:, 0], tr[:, 1]
    assert (np.diff(lows) >= -1e-12).all()
    assert (np.diff(highs) <= 1e-12).all()
    assert (lows <= highs + 1e-9).all()
    if res.reason == "converged":
        assert highs[-1] - lows[-1] <= 1e-6


def test_interior_point_certified_unseparable():
    # (1.5, 1.5) is the midpoint of two lattice points, so no direction works
    W, tau, u = [[1.0, 1.0]], [4.0], [3.0, 3.0]
    y_hat = [1.5, 1.5]
    for geometry in ("box", "l1"):
        res = generate_cut(W, tau, u, y_hat, geometry=geometry)
        assert res.cut is None
        assert res.certified_no_cut
        assert res.reason == "no-violation"


def test_l1_geometry_finds_valid_cut():
    corner = reduce_integer_set(W1, TAU1, U1, YHAT1).final
    res = generate_cut(W1, TAU1, U1, YHAT1, corner=corner, geometry="l1", validate=True)
    assert res.cut is not None
    assert float(res.cut.beta @ YHAT1) > res.cut.rhs + 1e-6


def test_inner_budget_aborts_without_truncated_rhs():
    res = generate_cut(W1, TAU1, U1, YHAT1, corner=None, inner_node_limit=1)
    assert res.cut is None
    assert res.reason == "inner-budget"
    assert not res.certified_no_cut
    assert res.mips_solved >= 1


def test_forced_shallow_corner_breaks_validity():
    # corner (4,0) is what the reduction produces with the probe disabled;
    # a cut built over that lattice slice must cut off the point (2,5),
    # which shows the probe's extra digging is not optional
    shallow = reduce_integer_set(W3, TAU3, U3, YHAT3, probe=False).final
    assert np.array_equal(shallow, [4.0, 0.0])
    res = generate_cut(W3, TAU3, U3, YHAT3, corner=shallow)
    assert res.cut is not None
    full_pts = enumerate_lattice(W3, TAU3, [0, 0], U3)
    worst = float((full_pts @ res.cut.beta).max())
    assert worst > res.cut.rhs + 1e-6
    far_corner = np.array([2.0, 5.0])
    assert float(res.cut.beta @ far_corner) > res.cut.rhs + 1e-6

    # with the probe on, the corner drops to (2,0) and the cut is clean
    deep = reduce_integer_set(W3, TAU3, U3, YHAT3, probe=True).final
    assert np.array_equal(deep, [2.0, 0.0])
    res2 = generate_cut(W3, TAU3, U3, YHAT3, corner=deep, validate=True)
    assert res2.cut is not None
    assert (full_pts @ res2.cut.beta <= res2.cut.rhs + 1e-7).all()


def test_validate_rejects_bad_cut():
    bad = FenchelCut(beta=np.array([1.0, 1.0]), rhs=0.5, violation=1.0, rounds=1)
    with pytest.raises(AssertionError):
        _validate_cut(np.array(W1), np.array(TAU1), np.array(U1), bad)
