"""Stage-wise decomposition of two-stage stochastic integer programs.

The driver maintains a first-stage master problem

    max  c.x + theta   s.t.  A x <= b,  x binary,
         theta + eta_t.x <= gamma_t    (expected-recourse bounds)

and a pool of per-scenario Fenchel cuts.  Each main iteration solves the
master exactly, then drives every scenario's cut-augmented LP relaxation
at the master's x to an integral argmax, generating Fenchel cuts one
after another while the argmax stays fractional (the integer-set
reduction supplies a lower corner when enabled) and falling back to one
exact integer solve when separation gives out, so each completed iterate
prices the true value of its first-stage point.

A scenario cut is generated at one tender h - Tx and is only guaranteed
for tenders dominated by it (the feasible regions nest), so each stored
cut carries two right-hand sides: the tight one for its generating
tender, used in scenario LPs whenever the current tender is dominated,
and a lifted one exact over the componentwise-largest tender any binary
x can produce, used otherwise and always used when scenario duals are
folded into an aggregated first-stage optimality cut.  Dual feasibility
is independent of the rhs, so pricing every row at its lifted rhs makes
the aggregated cut valid for every feasible x.  At iterates where all
scenarios are priced exactly, a second master cut pins the recourse
variable to the exact value at that x (and relaxes by the recourse range
per unit of Hamming distance away from it), which forces the master off
exhausted iterates and gives finite convergence.

Bounds: the master's optimal value is always an upper bound; whenever all
scenario relaxations come back integral (or have been solved exactly by
the escalation ladder) the iterate's true value is a lower bound.  The
loop stops when the relative gap closes, a budget runs out, or a full
iteration makes no progress of any kind (reported honestly as "stalled").

When cut generation fails at a fractional point the driver escalates:
retry without the reduction corner, retry over the signed 1-norm ball
(whose certified failure proves the point lies in the integer hull, so
the relaxation is already exact there), and finally solve the scenario's
integer program outright so the iterate can still be priced exactly.

`direct_solve` is the comparison arm: it hands the flat deterministic
equivalent to branch and bound, seeded with a rounding heuristic (floor
the relaxation's second stage per scenario after re-fixing the first
stage), and reports whatever bound the budget allows.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from fendec import fcg, lp, mip
from fendec.isg import reduce_integer_set
from fendec.lp import LpProblem, LpStatus
from fendec.mip import MipStatus
from fendec.model import StochasticProgram, build_dep, ensure_valid, recourse_value_bounds

INT_TOL = 1e-6


@dataclass
class SfdOptions:
    use_reduction: bool = True  # False reproduces the plain variant
    rel_gap: float = 1e-6
    max_iterations: int = 0  # main-loop iterations, 0 = unlimited
    time_limit: float = 0.0  # seconds, 0 = unlimited
    fcg_tol: float = 1e-6
    fcg_max_rounds: int = 200
    inner_node_limit: int = 0
    inner_time_limit: float = 0.0
    validate_cuts: bool = False  # enumerate the full lattice behind every cut


@dataclass
class SfdResult:
    status: str  # optimal | budget | stalled
    x: np.ndarray | None
    objective: float  # best exactly priced value (lower bound)
    best_bound: float  # master value (upper bound)
    gap_pct: float
    iterations: int
    fenchel_cuts: int
    mips_solved: int
    lshaped_cuts: int
    wall_s: float
    safeguard_cuts: int = 0
    bound_history: list[tuple[float, float]] = field(default_factory=list)
    cut_traces: list[tuple[str, list[tuple[float, float]]]] = field(default_factory=list)

    @property
    def gap_closed(self) -> bool:
        return self.status == "optimal"


def _relative_gap(lb: float, ub: float) -> float:
    if not np.isfinite(lb) or not np.isfinite(ub):
        return np.inf
    return abs(ub - lb) / max(abs(lb), 1e-12)


class _FirstStageMaster:
    """Binary x plus one continuous expected-recourse variable."""

    def __init__(self, program: StochasticProgram):
        n1 = program.n1
        lo, hi = recourse_value_bounds(program)
        obj = np.append(program.first.c, 1.0)
        rows = np.hstack([program.first.A, np.zeros((program.m1, 1))])
        self.prob = LpProblem(
            objective=obj,
            rows=rows,
            rhs=program.first.b.copy(),
            lower=np.append(np.zeros(n1), lo),
            upper=np.append(np.ones(n1), hi),
        )
        self.mask = np.append(np.ones(n1, dtype=bool), False)
        self.n1 = n1
        self.cuts = 0

    def add_cut(self, eta: np.ndarray, gamma: float) -> None:
        row = np.append(eta, 1.0)  # theta + eta.x <= gamma
        self.prob = LpProblem(
            objective=self.prob.objective,
            rows=np.vstack([self.prob.rows, row]),
            rhs=np.append(self.prob.rhs, gamma),
            lower=self.prob.lower,
            upper=self.prob.upper,
        )
        self.cuts += 1

    def solve(self) -> tuple[np.ndarray, float, float]:
        res = mip.solve_mip(self.prob, integer_mask=self.mask)
        if res.status is MipStatus.INFEASIBLE:
            raise ValueError("first stage is infeasible")
        if res.status is not MipStatus.OPTIMAL:
            raise RuntimeError(f"master ended with {res.status}")
        x = np.round(res.x[: self.n1])
        return x, float(res.x[self.n1]), res.objective


@dataclass
class _StoredCut:
    """One scenario cut with tender-aware right-hand sides.

    A cut is generated at one tender and its tight rhs `local_rhs` is exact
    for that tender's full region; at first-stage points whose tender is not
    dominated by the generating one, the row falls back to `global_rhs`,
    which is exact over the componentwise-largest tender any binary x can
    produce and therefore valid everywhere.  Master transfers always price
    the row at `global_rhs` so aggregated first-stage cuts stay valid for
    every x (dual feasibility does not depend on which rhs the LP used).
    """

    beta: np.ndarray
    local_rhs: float
    local_tender: np.ndarray
    global_rhs: float
    nonneg: bool


def _max_tender(program: StochasticProgram, s: int) -> np.ndarray:
    """Componentwise max of h_s - T_s x over binary x (first-stage rows ignored)."""
    sc = program.scenarios[s]
    return sc.h + np.maximum(-sc.T, 0.0).sum(axis=1)


class _ScenarioPool:
    """Accumulated Fenchel cut rows per scenario."""

    def __init__(self, program: StochasticProgram):
        self.program = program
        self.cuts: list[list[_StoredCut]] = [[] for _ in range(program.num_scenarios)]

    def add(self, s: int, cut: _StoredCut) -> None:
        self.cuts[s].append(cut)

    def _active_rhs(self, c: _StoredCut, tau: np.ndarray) -> float:
        if (tau <= c.local_tender + 1e-9).all():
            return c.local_rhs
        return c.global_rhs

    def augmented(self, s: int, tau: np.ndarray):
        """Base rows plus every cut row, each at its rhs valid for this tender.

        Returns (rows, rhs, transfer_rhs) where transfer_rhs carries the
        globally valid rhs per cut row for building first-stage cuts.
        """
        W = self.program.second.W
        if not self.cuts[s]:
            return W, tau, np.zeros(0)
        rows = np.vstack([W] + [c.beta for c in self.cuts[s]])
        act = np.array([self._active_rhs(c, tau) for c in self.cuts[s]])
        rhs = np.concatenate([tau, act])
        transfer = np.array([c.global_rhs for c in self.cuts[s]])
        return rows, rhs, transfer

    def reduction_region(self, s: int, tau: np.ndarray):
        """Rows fed to the corner computation: base plus nonnegative cuts only."""
        W = self.program.second.W
        keep = [c for c in self.cuts[s] if c.nonneg]
        if not keep:
            return W, tau
        rows = np.vstack([W] + [np.maximum(c.beta, 0.0) for c in keep])
        rhs = np.concatenate([tau, np.array([self._active_rhs(c, tau) for c in keep])])
        return rows, rhs


def _scenario_lp(program: StochasticProgram, s: int, rows, rhs) -> LpProblem:
    return LpProblem(
        objective=program.scenarios[s].q,
        rows=rows,
        rhs=rhs,
        lower=np.zeros(program.n2),
        upper=program.second.u,
    )


def _dual_pieces(program: StochasticProgram, s: int, sol, m2: int, cut_rhs: np.ndarray):
    """eta_s and gamma_s of the weak-duality bound built from one scenario LP."""
    sc = program.scenarios[s]
    pi_base = np.maximum(sol.row_duals[:m2], 0.0)
    pi_cut = np.maximum(sol.row_duals[m2:], 0.0)
    rc_plus = np.maximum(sol.reduced_costs, 0.0)
    eta = pi_base @ sc.T
    gamma = float(pi_base @ sc.h) + float(pi_cut @ cut_rhs) + float(rc_plus @ program.second.u)
    return eta, gamma


def sfd_solve(program: StochasticProgram, options: SfdOptions | None = None) -> SfdResult:
    """Run the decomposition to the requested gap or budget."""
    opt = options or SfdOptions()
    ensure_valid(program)
    t0 = time.monotonic()
    S = program.num_scenarios
    m2 = program.m2
    probs = np.array([sc.p for sc in program.scenarios])

    master = _FirstStageMaster(program)
    pool = _ScenarioPool(program)
    mips_solved = 0
    fenchel_cuts = 0
    cut_traces: list[tuple[str, list[tuple[float, float]]]] = []

    def out_of_time() -> bool:
        return bool(opt.time_limit) and time.monotonic() - t0 > opt.time_limit

    # ------------------------------------------------------------------
    # initialization: plain expected-relaxation cuts until the master
    # agrees with the LP-level value of its own iterate
    # ------------------------------------------------------------------
    init_rounds = 0
    while True:
        x_hat, theta_hat, master_val = master.solve()
        mips_solved += 1
        phi_lp = np.empty(S)
        pieces = []
        for s in range(S):
            tau = program.tender(s, x_hat)
            sol = lp.solve(_scenario_lp(program, s, program.second.W, tau))
            if sol.status is not LpStatus.OPTIMAL:
                raise RuntimeError(f"scenario {s} relaxation {sol.status.value} at a feasible x")
            phi_lp[s] = sol.objective
            pieces.append(_dual_pieces(program, s, sol, m2, np.zeros(0)))
        expected_lp = float(probs @ phi_lp)
        if theta_hat <= expected_lp + 1e-7 * max(1.0, abs(expected_lp)):
            break
        eta = sum(p * e for p, (e, _) in zip(probs, pieces))
        gamma = float(sum(p * g for p, (_, g) in zip(probs, pieces)))
        master.add_cut(eta, gamma)
        init_rounds += 1
        if init_rounds > 500:
            raise RuntimeError("initialization failed to converge")
        if out_of_time():
            return SfdResult(
                status="budget",
                x=None,
                objective=-np.inf,
                best_bound=master_val,
                gap_pct=np.inf,
                iterations=0,
                fenchel_cuts=0,
                mips_solved=mips_solved,
                lshaped_cuts=master.cuts,
                wall_s=time.monotonic() - t0,
            )
    lshaped_cuts = master.cuts

    # ------------------------------------------------------------------
    # main loop
    # ------------------------------------------------------------------
    lb = -np.inf
    ub = np.inf
    best_x = None
    history: list[tuple[float, float]] = []
    iterations = 0
    status = "budget"
    last_key = None
    safeguard_cuts = 0
    recourse_hi = recourse_value_bounds(program)[1]

    while True:
        if opt.max_iterations and iterations >= opt.max_iterations:
            status = "budget"
            break
        if out_of_time():
            status = "budget"
            break
        if iterations:
            x_hat, theta_hat, master_val = master.solve()
            mips_solved += 1
        ub = min(ub, master_val)
        iterations += 1

        cuts_this_iter = 0
        all_exact = True
        exact_values = np.empty(S)
        incumbent_values = np.empty(S)  # true achievable value per scenario at x_hat
        pieces = []
        for s in range(S):
            tau = program.tender(s, x_hat)
            rows_aug, rhs_aug, transfer = pool.augmented(s, tau)
            sol = lp.solve(_scenario_lp(program, s, rows_aug, rhs_aug))
            if sol.status is not LpStatus.OPTIMAL:
                raise RuntimeError(f"scenario {s} relaxation {sol.status.value} at a feasible x")
            # keep cutting this scenario at the current x until its relaxation
            # argmax is integral, separation gives out (price exactly then), or
            # the clock does; only a clock exit leaves the scenario inexact
            while True:
                y_hat = sol.x
                fractional = bool((np.abs(y_hat - np.round(y_hat)) > INT_TOL).any())
                if not fractional:
                    exact_values[s] = incumbent_values[s] = sol.objective
                    break
                if out_of_time():
                    all_exact = False
                    exact_values[s] = sol.objective  # upper estimate, never a lower bound
                    # flooring stays feasible (downward-closed region), so the
                    # floored argmax is a true achievable value at this x
                    incumbent_values[s] = float(
                        program.scenarios[s].q @ np.floor(y_hat + 1e-9)
                    )
                    break
                cut = None
                if opt.use_reduction:
                    red_rows, red_rhs = pool.reduction_region(s, tau)
                    corner = reduce_integer_set(
                        red_rows, red_rhs, program.second.u, y_hat, probe=True
                    ).final
                else:
                    corner = None
                attempts = [(corner, "box")]
                if corner is not None and corner.any():
                    attempts.append((None, "box"))
                attempts.append((None, "l1"))
                certified = False
                carried: list[np.ndarray] = []
                for att_corner, geometry in attempts:
                    res = fcg.generate_cut(
                        rows_aug,
                        rhs_aug,
                        program.second.u,
                        y_hat,
                        corner=att_corner,
                        geometry=geometry,
                        tol=opt.fcg_tol,
                        max_rounds=opt.fcg_max_rounds,
                        inner_node_limit=opt.inner_node_limit,
                        inner_time_limit=opt.inner_time_limit,
                        validate=opt.validate_cuts,
                        verify_full_region=True,
                        # argmaxes from a corner-restricted attempt stay feasible
                        # once the corner is dropped, so later rungs reuse them
                        support=np.array(carried) if carried else None,
                    )
                    mips_solved += res.mips_solved
                    if res.bounds_trace:
                        cut_traces.append((res.reason, list(res.bounds_trace)))
                    if res.support is not None:
                        carried.extend(res.support)
                    if res.cut is not None:
                        cut = res.cut
                        break
                    certified = certified or res.certified_no_cut
                if cut is None:
                    # separation exhausted: price this scenario exactly
                    ip = mip.solve_mip(_scenario_lp(program, s, program.second.W, tau))
                    mips_solved += 1
                    if ip.status is not MipStatus.OPTIMAL:
                        raise RuntimeError(f"scenario {s} integer problem {ip.status}")
                    if certified and abs(ip.objective - sol.objective) > 1e-5 * max(
                        1.0, abs(ip.objective)
                    ):
                        raise AssertionError(
                            "certified unseparable point but relaxation and integer "
                            f"values differ: {sol.objective!r} vs {ip.objective!r}"
                        )
                    exact_values[s] = incumbent_values[s] = ip.objective
                    break
                tau_max = _max_tender(program, s)
                if (tau >= tau_max - 1e-9).all():
                    g_glob = cut.rhs
                else:
                    # an LP bound over the largest reachable tender is already
                    # valid for every binary x; exactness is not needed here
                    lift = lp.solve(
                        LpProblem(
                            objective=cut.beta,
                            rows=program.second.W,
                            rhs=tau_max,
                            lower=np.zeros(program.n2),
                            upper=program.second.u,
                        )
                    )
                    if lift.status is not LpStatus.OPTIMAL:
                        raise RuntimeError(f"global lift for scenario {s} ended {lift.status}")
                    g_glob = max(float(lift.objective), cut.rhs)
                pool.add(
                    s,
                    _StoredCut(
                        beta=cut.beta.copy(),
                        local_rhs=cut.rhs,
                        local_tender=tau.copy(),
                        global_rhs=g_glob,
                        nonneg=bool((cut.beta >= -1e-12).all()),
                    ),
                )
                fenchel_cuts += 1
                cuts_this_iter += 1
                rows_aug, rhs_aug, transfer = pool.augmented(s, tau)
                sol = lp.solve(_scenario_lp(program, s, rows_aug, rhs_aug))
                if sol.status is not LpStatus.OPTIMAL:
                    raise RuntimeError(f"scenario {s} lost feasibility after a cut")
            pieces.append(_dual_pieces(program, s, sol, m2, transfer))

        value = float(program.first.c @ x_hat) + float(probs @ incumbent_values)
        if value > lb:
            lb = value
            best_x = x_hat.copy()
        history.append((lb, ub))

        if _relative_gap(lb, ub) <= opt.rel_gap:
            status = "optimal"
            break

        eta = sum(p * e for p, (e, _) in zip(probs, pieces))
        gamma = float(sum(p * g for p, (_, g) in zip(probs, pieces)))
        master.add_cut(eta, gamma)

        if all_exact:
            # pin theta to the exact recourse at this x, relaxed by the
            # recourse range per unit Hamming distance; keeps the cut valid
            # everywhere while making this x unrepeatable at a better theta
            r_hat = float(probs @ exact_values)
            slope = max(recourse_hi - r_hat, 0.0)
            eta_sg = np.where(x_hat > 0.5, slope, -slope)
            master.add_cut(eta_sg, r_hat + slope * float(x_hat.sum()))
            safeguard_cuts += 1

        key = (x_hat.tobytes(), round(master_val, 9))
        if cuts_this_iter == 0 and key == last_key:
            status = "stalled"
            break
        last_key = key

    wall = time.monotonic() - t0
    return SfdResult(
        status=status,
        x=best_x,
        objective=lb,
        best_bound=ub,
        gap_pct=100.0 * _relative_gap(lb, ub),
        iterations=iterations,
        fenchel_cuts=fenchel_cuts,
        mips_solved=mips_solved,
        lshaped_cuts=lshaped_cuts,
        wall_s=wall,
        safeguard_cuts=safeguard_cuts,
        bound_history=history,
        cut_traces=cut_traces,
    )


def _rounding_incumbent(program: StochasticProgram, dep, relaxation_x: np.ndarray):
    """Integral feasible point from the relaxation: floor x (first-stage rows
    have nonnegative weights), then floor each scenario's re-solved relaxation
    (each scenario region is downward closed once x is fixed)."""
    n1, n2 = program.n1, program.n2
    x = np.floor(relaxation_x[:n1] + 1e-9)
    if program.m1 and (program.first.A @ x > program.first.b + 1e-9).any():
        return None
    full = np.zeros(dep.problem.num_vars)
    full[:n1] = x
    for s in range(program.num_scenarios):
        tau = program.tender(s, x)
        if (tau < -1e-9).any():
            return None
        sol = lp.solve(_scenario_lp(program, s, program.second.W, tau))
        if sol.status is not LpStatus.OPTIMAL:
            return None
        full[n1 + s * n2 : n1 + (s + 1) * n2] = np.floor(sol.x + 1e-9)
    return full


def direct_solve(
    program: StochasticProgram,
    time_limit: float = 0.0,
    node_limit: int = 0,
) -> SfdResult:
    """Solve the flat deterministic equivalent by branch and bound."""
    ensure_valid(program)
    t0 = time.monotonic()
    dep = build_dep(program)
    root = lp.solve(dep.problem)
    warm = None
    if root.status is LpStatus.OPTIMAL:
        warm = _rounding_incumbent(program, dep, root.x)
    res = mip.solve_mip(
        dep.problem,
        integer_mask=dep.integer_mask,
        node_limit=node_limit,
        time_limit=time_limit,
        warm_start=warm,
    )
    wall = time.monotonic() - t0
    x = res.x[: program.n1] if res.x is not None else None
    status = {"optimal": "optimal", "budget": "budget"}.get(res.status.value, res.status.value)
    return SfdResult(
        status=status,
        x=x,
        objective=res.objective,
        best_bound=res.best_bound,
        gap_pct=res.gap_pct,
        iterations=res.nodes,
        fenchel_cuts=0,
        mips_solved=1,
        lshaped_cuts=0,
        wall_s=wall,
        bound_history=[],
        cut_traces=[],
    )
