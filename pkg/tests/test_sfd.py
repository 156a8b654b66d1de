"""End-to-end tests of the decomposition against brute force on small programs."""

import numpy as np
import pytest

from fendec.model import FirstStage, Scenario, SecondStage, StochasticProgram
from fendec.sfd import SfdOptions, direct_solve, sfd_solve

from oracles import brute_force_two_stage


def tiny_program() -> StochasticProgram:
    first = FirstStage(c=[3.0, 2.0], A=[[1.0, 1.0]], b=[2.0])
    second = SecondStage(W=[[1.0, 2.0], [2.0, 1.0]], u=[2.0, 2.0])
    scen = [
        Scenario(p=0.5, q=[4.0, 1.0], h=[4.0, 5.0], T=[[-1.0, 0.0], [0.0, -1.0]]),
        Scenario(p=0.5, q=[1.0, 3.0], h=[5.0, 4.0], T=[[0.0, -2.0], [-1.0, 0.0]]),
    ]
    return StochasticProgram(first=first, second=second, scenarios=scen, name="tiny")


def random_toy(seed: int) -> StochasticProgram:
    """Small random program with guaranteed feasible recourse (T <= 0, h >= 0)."""
    rng = np.random.default_rng(seed)
    n1 = int(rng.integers(2, 4))
    n2 = int(rng.integers(2, 4))
    m2 = int(rng.integers(1, 3))
    S = int(rng.integers(2, 4))
    first = FirstStage(
        c=rng.uniform(1, 10, n1),
        A=np.ones((1, n1)),
        b=[float(np.ceil(n1 / 2))],
    )
    u = rng.integers(1, 4, n2).astype(float)
    W = rng.uniform(0.5, 3.0, (m2, n2))
    second = SecondStage(W=W, u=u)
    p = rng.uniform(0.5, 1.5, S)
    p = p / p.sum()
    scen = []
    for s in range(S):
        T = -rng.uniform(0.0, 2.0, (m2, n1))
        h = W @ u * rng.uniform(0.3, 0.9, m2)
        scen.append(Scenario(p=float(p[s]), q=rng.uniform(1, 8, n2), h=h, T=T))
    return StochasticProgram(first=first, second=second, scenarios=scen, name=f"toy{seed}")


def reference_value(program: StochasticProgram) -> float:
    tuples = [
        (s.p, s.q, program.second.W, s.h, s.T, program.second.u) for s in program.scenarios
    ]
    val, _ = brute_force_two_stage(program.first.c, program.first.A, program.first.b, tuples)
    return val


def test_tiny_program_both_variants_reach_brute_force():
    p = tiny_program()
    ref = reference_value(p)
    for use_reduction in (True, False):
        res = sfd_solve(p, SfdOptions(use_reduction=use_reduction, validate_cuts=True))
        assert res.status == "optimal"
        assert res.objective == pytest.approx(ref, abs=1e-6)
        assert res.x is not None
        assert res.gap_pct <= 1e-4


def test_direct_solve_matches_brute_force():
    p = tiny_program()
    res = direct_solve(p)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(reference_value(p), abs=1e-8)
    assert res.mips_solved == 1


def test_random_toys_agree_with_brute_force():
    for seed in range(10):
        p = random_toy(seed)
        ref = reference_value(p)
        with_r = sfd_solve(p, SfdOptions(use_reduction=True, validate_cuts=True))
        without_r = sfd_solve(p, SfdOptions(use_reduction=False, validate_cuts=True))
        for res in (with_r, without_r):
            assert res.status == "optimal", f"seed {seed}: {res.status}"
            assert res.objective == pytest.approx(ref, rel=1e-6, abs=1e-6), f"seed {seed}"
        assert with_r.objective == pytest.approx(without_r.objective, abs=1e-9)
        direct = direct_solve(p)
        assert direct.objective == pytest.approx(ref, rel=1e-8, abs=1e-8)


def test_bounds_are_a_sandwich_over_iterations():
    p = tiny_program()
    res = sfd_solve(p, SfdOptions())
    hist = np.array(res.bound_history)
    lbs = hist[:, 0][np.isfinite(hist[:, 0])]
    ubs = hist[:, 1]
    if lbs.size > 1:
        assert (np.diff(lbs) >= -1e-9).all()
    assert (np.diff(ubs) <= 1e-9).all()
    for lo, hi in res.bound_history:
        if np.isfinite(lo):
            assert lo <= hi + 1e-6


def test_iteration_budget_reports_honestly():
    p = tiny_program()
    res = sfd_solve(p, SfdOptions(max_iterations=1))
    assert res.status in ("budget", "optimal")
    assert res.iterations <= 1
    if res.status == "budget" and np.isfinite(res.objective):
        assert res.objective <= res.best_bound + 1e-6


def test_cut_traces_recorded():
    p = tiny_program()
    res = sfd_solve(p, SfdOptions(use_reduction=True))
    for _reason, trace in res.cut_traces:
        tr = np.array(trace)
        assert (np.diff(tr[:, 0]) >= -1e-12).all()
        assert (np.diff(tr[:, 1]) <= 1e-12).all()
        assert (tr[:, 0] <= tr[:, 1] + 1e-9).all()
