"""Branch-and-bound integer programming over the bounded simplex.

Maximizes c.x over rows.x <= rhs with finite variable bounds and a mask
saying which variables must be integral.  The search is deterministic:
nodes are explored best-bound-first (ties prefer the deeper node, then
insertion order), branching picks the masked variable whose value is
farthest from an integer (ties by lowest index), and children split on
floor/ceil of the fractional value.

A warm-start point may be supplied; it must be feasible and integral on
the mask, and it seeds the incumbent so pruning starts immediately.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from fendec import lp
from fendec.lp import LpProblem, LpStatus

INT_TOL = 1e-6


class MipStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    BUDGET = "budget"  # node or time budget hit with the tree still open


@dataclass
class MipResult:
    status: MipStatus
    x: np.ndarray | None
    objective: float  # best integral value found, -inf if none
    best_bound: float  # valid upper bound on the true optimum
    nodes: int
    gap_pct: float
    bound_history: list[float] = field(default_factory=list)


def _fractional_index(x: np.ndarray, mask: np.ndarray, tol: float) -> int:
    dist = np.where(mask, np.abs(x - np.round(x)), 0.0)
    j = int(np.argmax(dist))
    return j if dist[j] > tol else -1


def _check_start(prob: LpProblem, mask: np.ndarray, point: np.ndarray) -> float:
    x = np.asarray(point, dtype=float)
    if x.shape != (prob.num_vars,):
        raise ValueError("warm start has wrong length")
    if (x < prob.lower - 1e-7).any() or (x > prob.upper + 1e-7).any():
        raise ValueError("warm start violates variable bounds")
    if prob.num_rows and (prob.rows @ x > prob.rhs + 1e-6).any():
        raise ValueError("warm start violates a row")
    if (np.abs(x[mask] - np.round(x[mask])) > 1e-6).any():
        raise ValueError("warm start is not integral on the mask")
    return float(prob.objective @ x)


def solve_mip(
    prob: LpProblem,
    integer_mask: np.ndarray | None = None,
    node_limit: int = 0,
    time_limit: float = 0.0,
    int_tol: float = INT_TOL,
    warm_start: np.ndarray | None = None,
) -> MipResult:
    """Solve max c.x, rows.x <= rhs, bounds, x integral on the mask.

    node_limit/time_limit of 0 mean unlimited; a finite box guarantees the
    tree itself is finite.
    """
    mask = np.ones(prob.num_vars, dtype=bool) if integer_mask is None else np.asarray(integer_mask, dtype=bool)
    t0 = time.monotonic()

    inc_x = None
    inc_val = -np.inf
    if warm_start is not None:
        inc_val = _check_start(prob, mask, warm_start)
        inc_x = np.asarray(warm_start, dtype=float).copy()

    def prune_tol() -> float:
        return 1e-9 * max(1.0, abs(inc_val)) if np.isfinite(inc_val) else 0.0

    nodes = 0
    history: list[float] = []
    heap: list = []
    counter = itertools.count()

    def node_solve(lo: np.ndarray, hi: np.ndarray, depth: int):
        """Solve the relaxation at one node; fathom, store incumbent, or push."""
        nonlocal nodes, inc_x, inc_val
        nodes += 1
        sol = lp.solve(
            LpProblem(objective=prob.objective, rows=prob.rows, rhs=prob.rhs, lower=lo, upper=hi)
        )
        if sol.status is LpStatus.INFEASIBLE:
            return
        if sol.status is not LpStatus.OPTIMAL:
            raise RuntimeError(f"node relaxation ended with {sol.status}")
        if np.isfinite(inc_val) and sol.objective <= inc_val + prune_tol():
            return
        j = _fractional_index(sol.x, mask, int_tol)
        if j < 0:
            x = sol.x.copy()
            x[mask] = np.round(x[mask])
            np.clip(x, lo, hi, out=x)
            val = float(prob.objective @ x)
            if val > inc_val:
                inc_val = val
                inc_x = x
            return
        heapq.heappush(heap, (-sol.objective, -depth, next(counter), sol.x, lo, hi))

    node_solve(prob.lower.copy(), prob.upper.copy(), 0)

    budget_hit = False
    while heap:
        best_open = -heap[0][0]
        history.append(max(best_open, inc_val) if np.isfinite(inc_val) else best_open)
        if node_limit and nodes >= node_limit:
            budget_hit = True
            break
        if time_limit and time.monotonic() - t0 > time_limit:
            budget_hit = True
            break
        neg_bound, neg_depth, _, x, lo, hi = heapq.heappop(heap)
        bound = -neg_bound
        depth = -neg_depth
        if np.isfinite(inc_val) and bound <= inc_val + prune_tol():
            continue  # fathomed by an incumbent found after this node was pushed
        j = _fractional_index(x, mask, int_tol)
        if j < 0:
            continue  # stale node that became integral after clipping; nothing to do
        v = x[j]
        lo_child, hi_child = lo.copy(), hi.copy()
        hi_child[j] = np.floor(v)
        if hi_child[j] >= lo[j] - 1e-9:
            node_solve(lo_child, hi_child, depth + 1)
        lo_child2, hi_child2 = lo.copy(), hi.copy()
        lo_child2[j] = np.ceil(v)
        if lo_child2[j] <= hi[j] + 1e-9:
            node_solve(lo_child2, hi_child2, depth + 1)

    if heap and budget_hit:
        best_bound = max(-heap[0][0], inc_val) if np.isfinite(inc_val) else -heap[0][0]
        status = MipStatus.BUDGET
    else:
        best_bound = inc_val
        status = MipStatus.OPTIMAL if inc_x is not None else MipStatus.INFEASIBLE
    if inc_x is None:
        gap = np.inf
    else:
        gap = 100.0 * abs(best_bound - inc_val) / max(abs(inc_val), 1e-9)
    return MipResult(
        status=status,
        x=inc_x,
        objective=inc_val,
        best_bound=best_bound,
        nodes=nodes,
        gap_pct=gap,
        bound_history=history,
    )


def enumerate_lattice(rows, rhs, lower, upper, limit: int = 2_000_000) -> np.ndarray:
    """All integer points of [lower, upper] satisfying rows.x <= rhs.

    Exhaustive; refuses boxes with more than `limit` lattice points.  Meant
    for validating cuts and small solves, not for production solving.
    """
    lower = np.asarray(lower)
    upper = np.asarray(upper)
    rows = np.asarray(rows, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    sizes = np.floor(upper + 1e-9).astype(int) - np.ceil(lower - 1e-9).astype(int) + 1
    if (sizes <= 0).any():
        return np.zeros((0, lower.size))
    total = int(np.prod(sizes.astype(np.float64)))
    if total > limit:
        raise ValueError(f"lattice of {total} points exceeds limit {limit}")
    axes = [np.arange(np.ceil(lo - 1e-9), np.floor(hi + 1e-9) + 1) for lo, hi in zip(lower, upper)]
    grid = np.array(list(itertools.product(*axes)), dtype=float)
    if rows.size:
        keep = (grid @ rows.T <= rhs + 1e-9).all(axis=1)
        grid = grid[keep]
    return grid
