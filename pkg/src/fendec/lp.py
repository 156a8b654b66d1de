"""Dense bounded-variable linear programming by two-phase primal simplex.

Solves   max  c.x   s.t.  R x <= rhs,  lower <= x <= upper
with every variable bound finite.  All inequality rows are `<=`; callers
encode `>=` rows by negation before building the problem.

The solver is deterministic: Dantzig pricing (largest reduced cost, ties
broken by lowest column index) with a permanent switch to Bland's rule
after a run of degenerate steps, so repeated solves of the same data take
the same pivot path.  Row duals are reported with the sign convention
that makes them nonnegative at optimality for a maximization over `<=`
rows.  After the pivot loop the basis is refactorized once from scratch
(numpy solve) so primal values and duals are free of tableau drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-9
RC_TOL = 1e-9


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class LpProblem:
    """max objective.x s.t. rows.x <= rhs, lower <= x <= upper (all finite)."""

    objective: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.rows = np.asarray(self.rows, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        n = self.objective.shape[0]
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, n)
        if self.rows.shape[1] != n:
            raise ValueError(f"rows have {self.rows.shape[1]} columns, objective has {n}")
        if self.rows.shape[0] != self.rhs.shape[0]:
            raise ValueError("rhs length does not match row count")
        if self.lower.shape[0] != n or self.upper.shape[0] != n:
            raise ValueError("bound arrays must match objective length")
        if not (np.isfinite(self.lower).all() and np.isfinite(self.upper).all()):
            raise ValueError("all variable bounds must be finite")
        if (self.lower > self.upper + FEAS_TOL).any():
            raise ValueError("lower bound exceeds upper bound")

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray
    objective: float
    row_duals: np.ndarray
    reduced_costs: np.ndarray
    iterations: int
    # slack per row: rhs - rows.x, for binding-row queries
    row_slacks: np.ndarray = field(default=None)  # type: ignore[assignment]

    def binding_rows(self, tol: float = 1e-6) -> np.ndarray:
        return np.flatnonzero(self.row_slacks <= tol)


_BASIC, _AT_LO, _AT_HI = 0, 1, 2


class _Tableau:
    """Full dense tableau for the bounded simplex, phase aware."""

    def __init__(self, prob: LpProblem):
        n, m = prob.num_vars, prob.num_rows
        self.n = n
        self.m = m
        # columns: structurals, then one slack per row, artificials appended later
        self.ncols = n + m
        self.lo = np.concatenate([prob.lower, np.zeros(m)])
        self.hi = np.concatenate([prob.upper, np.full(m, np.inf)])
        self.A = np.hstack([prob.rows, np.eye(m)]) if m else np.zeros((0, n))
        self.rhs = prob.rhs.copy()
        self.n_artificial = 0
        self.iterations = 0
        self.degenerate_run = 0
        self.use_bland = False

    def install_start_basis(self):
        """Structurals at lower bound; slack basic where the residual allows,
        otherwise an artificial column carries the (positive) infeasibility."""
        n, m = self.n, self.m
        resid = self.rhs - self.A[:, :n] @ self.lo[:n]
        art_rows = np.flatnonzero(resid < 0)
        self.n_artificial = len(art_rows)
        if self.n_artificial:
            art_cols = np.zeros((m, self.n_artificial))
            for pos, r in enumerate(art_rows):
                art_cols[r, pos] = -1.0
            self.A = np.hstack([self.A, art_cols])
            self.lo = np.concatenate([self.lo, np.zeros(self.n_artificial)])
            self.hi = np.concatenate([self.hi, np.full(self.n_artificial, np.inf)])
        self.ncols = self.A.shape[1]
        self.stat = np.full(self.ncols, _AT_LO, dtype=np.int8)
        self.basis = np.empty(m, dtype=np.int64)
        self.xb = np.empty(m)
        next_art = n + m
        for r in range(m):
            if resid[r] >= 0:
                self.basis[r] = n + r
                self.xb[r] = resid[r]
            else:
                self.basis[r] = next_art
                self.xb[r] = -resid[r]
                next_art += 1
        self.stat[self.basis] = _BASIC
        # start basis is diagonal: +1 for slack columns, -1 for artificials,
        # so B^-1 A is A with the artificial rows negated
        self.M = self.A.copy()
        for r in range(m):
            if self.basis[r] >= n + m:
                self.M[r, :] *= -1.0

    def nonbasic_value(self, j: int) -> float:
        return self.lo[j] if self.stat[j] == _AT_LO else self.hi[j]

    def build_zrow(self, c_full: np.ndarray):
        self.c_full = c_full
        cb = c_full[self.basis]
        self.zrow = c_full - cb @ self.M if self.m else c_full.copy()

    def _entering(self, allow: np.ndarray) -> int:
        z = self.zrow
        lo_ok = allow & (self.stat == _AT_LO) & (z > RC_TOL)
        hi_ok = allow & (self.stat == _AT_HI) & (z < -RC_TOL)
        cand = np.flatnonzero(lo_ok | hi_ok)
        if cand.size == 0:
            return -1
        if self.use_bland:
            return int(cand[0])
        scores = np.abs(z[cand])
        best = scores.max()
        return int(cand[scores >= best - 1e-15][0])

    def iterate(self, allow: np.ndarray, max_iter: int) -> str:
        """Pivot until optimal for the current zrow. Returns a status string."""
        while True:
            if self.iterations >= max_iter:
                return "iteration_limit"
            j = self._entering(allow)
            if j < 0:
                return "optimal"
            self.iterations += 1
            direction = 1.0 if self.stat[j] == _AT_LO else -1.0
            y = self.M[:, j] if self.m else np.zeros(0)
            step = y * direction
            # ratio test: basic variable hits one of its own bounds
            t_best = self.hi[j] - self.lo[j]  # entering flips to its other bound
            leave_row = -1
            leave_to = _AT_LO
            for r in range(self.m):
                d = step[r]
                bcol = self.basis[r]
                if d > PIVOT_TOL:
                    t = (self.xb[r] - self.lo[bcol]) / d
                    hit = _AT_LO
                elif d < -PIVOT_TOL:
                    t = (self.hi[bcol] - self.xb[r]) / (-d)
                    hit = _AT_HI
                else:
                    continue
                if not np.isfinite(t):
                    continue  # an unbounded basic variable never blocks
                if t < -1e-12:
                    t = 0.0
                better = t < t_best - 1e-12
                tie = abs(t - t_best) <= 1e-12 and leave_row >= 0 and bcol < self.basis[leave_row]
                if better or tie:
                    t_best = t
                    leave_row = r
                    leave_to = hit
            if not np.isfinite(t_best):
                return "unbounded"
            self.degenerate_run = self.degenerate_run + 1 if t_best <= 1e-12 else 0
            if self.degenerate_run > 200:
                self.use_bland = True  # anti-cycling from here on
            if self.m:
                self.xb -= t_best * step
            if leave_row < 0:
                # pure bound flip, basis unchanged
                self.stat[j] = _AT_HI if self.stat[j] == _AT_LO else _AT_LO
                continue
            enter_val = self.nonbasic_value(j) + direction * t_best
            leaving = self.basis[leave_row]
            self.stat[leaving] = leave_to
            self.stat[j] = _BASIC
            self.basis[leave_row] = j
            self.xb[leave_row] = enter_val
            piv = self.M[leave_row, j]
            self.M[leave_row, :] /= piv
            col = self.M[:, j].copy()
            col[leave_row] = 0.0
            self.M -= np.outer(col, self.M[leave_row, :])
            self.M[:, j] = 0.0
            self.M[leave_row, j] = 1.0
            self.zrow = self.zrow - self.zrow[j] * self.M[leave_row, :]
            self.zrow[j] = 0.0

    def drive_out_artificials(self):
        """Degenerate-pivot basic artificials onto real columns; freeze the
        artificials of genuinely redundant rows at zero."""
        n_real = self.n + self.m
        for r in range(self.m):
            if self.basis[r] < n_real:
                continue
            row = self.M[r, :n_real]
            cand = np.flatnonzero((np.abs(row) > 1e-7) & (self.stat[:n_real] != _BASIC))
            if cand.size == 0:
                self.hi[self.basis[r]] = 0.0  # redundant row, artificial pinned at 0
                continue
            j = int(cand[0])
            leaving = self.basis[r]
            enter_val = self.nonbasic_value(j)
            self.stat[leaving] = _AT_LO
            self.hi[leaving] = 0.0
            self.stat[j] = _BASIC
            self.basis[r] = j
            self.xb[r] = enter_val
            piv = self.M[r, j]
            self.M[r, :] /= piv
            col = self.M[:, j].copy()
            col[r] = 0.0
            self.M -= np.outer(col, self.M[r, :])
            self.M[:, j] = 0.0
            self.M[r, j] = 1.0

    def assemble(self) -> np.ndarray:
        x = np.where(self.stat == _AT_LO, self.lo, np.where(self.stat == _AT_HI, self.hi, 0.0))
        x[self.basis] = self.xb
        return x


def solve(prob: LpProblem, max_iterations: int = 0) -> LpSolution:
    """Two-phase bounded simplex. max_iterations=0 picks a size-based cap."""
    n, m = prob.num_vars, prob.num_rows
    if max_iterations <= 0:
        max_iterations = 20000 + 50 * (n + m)

    if m == 0:
        x = np.where(prob.objective > 0, prob.upper, prob.lower)
        return LpSolution(
            status=LpStatus.OPTIMAL,
            x=x,
            objective=float(prob.objective @ x),
            row_duals=np.zeros(0),
            reduced_costs=prob.objective.copy(),
            iterations=0,
            row_slacks=np.zeros(0),
        )

    tab = _Tableau(prob)
    tab.install_start_basis()

    allow = np.ones(tab.ncols, dtype=bool)
    if tab.n_artificial:
        c1 = np.zeros(tab.ncols)
        c1[n + m:] = -1.0  # maximize minus the total infeasibility
        tab.build_zrow(c1)
        status = tab.iterate(allow, max_iterations)
        if status == "iteration_limit":
            return _limit_solution(prob, tab)
        art_total = tab.xb[tab.basis >= n + m].sum() if m else 0.0
        if art_total > FEAS_TOL * max(1.0, np.abs(prob.rhs).max()):
            return LpSolution(
                status=LpStatus.INFEASIBLE,
                x=np.full(n, np.nan),
                objective=np.nan,
                row_duals=np.full(m, np.nan),
                reduced_costs=np.full(n, np.nan),
                iterations=tab.iterations,
                row_slacks=np.full(m, np.nan),
            )
        tab.drive_out_artificials()
        allow[n + m:] = False  # artificials never re-enter

    c2 = np.zeros(tab.ncols)
    c2[:n] = prob.objective
    tab.build_zrow(c2)
    status = tab.iterate(allow, max_iterations)
    if status == "iteration_limit":
        return _limit_solution(prob, tab)
    if status == "unbounded":
        return LpSolution(
            status=LpStatus.UNBOUNDED,
            x=np.full(n, np.nan),
            objective=np.inf,
            row_duals=np.full(m, np.nan),
            reduced_costs=np.full(n, np.nan),
            iterations=tab.iterations,
            row_slacks=np.full(m, np.nan),
        )
    return _clean_solution(prob, tab)


def _clean_solution(prob: LpProblem, tab: _Tableau) -> LpSolution:
    """Refactorize the final basis so values and duals carry no pivot drift."""
    n, m = prob.num_vars, prob.num_rows
    B = tab.A[:, tab.basis]
    nb_mask = tab.stat != _BASIC
    v = np.where(tab.stat == _AT_HI, tab.hi, tab.lo)
    v[~nb_mask] = 0.0
    try:
        xb = np.linalg.solve(B, tab.rhs - tab.A[:, nb_mask] @ v[nb_mask])
        yT = np.linalg.solve(B.T, tab.c_full[tab.basis])
        zrow = tab.c_full - yT @ tab.A
        x_full = v.copy()
        x_full[tab.basis] = xb
    except np.linalg.LinAlgError:
        # singular final basis should not happen; fall back to tableau state
        zrow = tab.zrow
        x_full = tab.assemble()
    x = x_full[:n]
    x = np.clip(x, prob.lower - 1e-7, prob.upper + 1e-7)
    slacks = prob.rhs - prob.rows @ x
    duals = -zrow[n:n + m]
    duals[np.abs(duals) < 1e-12] = 0.0
    return LpSolution(
        status=LpStatus.OPTIMAL,
        x=x,
        objective=float(prob.objective @ x),
        row_duals=duals,
        reduced_costs=zrow[:n].copy(),
        iterations=tab.iterations,
        row_slacks=slacks,
    )


def _limit_solution(prob: LpProblem, tab: _Tableau) -> LpSolution:
    n, m = prob.num_vars, prob.num_rows
    x = tab.assemble()[:n]
    return LpSolution(
        status=LpStatus.ITERATION_LIMIT,
        x=x,
        objective=float(prob.objective @ x),
        row_duals=np.full(m, np.nan),
        reduced_costs=np.full(n, np.nan),
        iterations=tab.iterations,
        row_slacks=prob.rhs - prob.rows @ x,
    )


def add_row_resolve(prob: LpProblem, row: np.ndarray, rhs: float) -> tuple[LpProblem, LpSolution]:
    """Append one `<=` row and resolve from scratch.

    A warm-started dual pivot would be faster; solving the augmented problem
    fresh meets the same contract and keeps the pivot path deterministic.
    """
    row = np.asarray(row, dtype=float).reshape(1, -1)
    if row.shape[1] != prob.num_vars:
        raise ValueError("new row length does not match variable count")
    new = LpProblem(
        objective=prob.objective,
        rows=np.vstack([prob.rows, row]),
        rhs=np.append(prob.rhs, float(rhs)),
        lower=prob.lower,
        upper=prob.upper,
    )
    return new, solve(new)
