"""Integer-set reduction for bounded knapsack-style feasible regions.

Given rows W y <= tau with W >= 0, integer bounds 0 <= y <= u, and a
fractional point y_hat on the boundary of the relaxation, this module
computes a lower corner ybar <= floor(y_hat) such that restricting the
lattice search to { y integer feasible : y >= ybar } still supports a
separating cut for y_hat.  Shrinking the searched set this way makes the
cut generator's inner integer problems much cheaper.

The corner starts at floor(y_hat) and is lowered by two mechanisms worked
per ordered axis pair (i, j):

  * a slack ratio d(i, j): the room row constraints leave coordinate j
    when coordinates outside the pair stay at y_hat and the pair sits at
    the current corner.  While d < 1 the corner steps down along i, or
    along j once i reaches zero.
  * an integer probe: once the ratio test stalls, drop coordinate i by
    b = 1, 2, ... (while the corner stays above coordinate j) and keep the
    drop whenever it frees at least one extra integer unit of j within
    j's bound.

Axes are processed in ascending order of their total weight over the
binding rows of y_hat, ties by index; all steps keep the corner feasible
because W is nonnegative.  Every move is recorded in a trace so the
reduction can be inspected and demonstrated end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BIND_TOL = 1e-6
EPS = 1e-9  # floor nudge and strict-inequality guard


def _floor(v: float) -> float:
    return float(np.floor(v + EPS))


@dataclass
class ReductionStep:
    pair: tuple[int, int]
    rule: str  # "ratio-first", "ratio-second", "probe"
    value: float  # the d that fired, or the probe depth b
    point: np.ndarray  # corner after the step


@dataclass
class ReductionTrace:
    y_hat: np.ndarray
    start: np.ndarray
    axis_order: list[int]
    binding_rows: list[int]
    steps: list[ReductionStep] = field(default_factory=list)
    final: np.ndarray = None  # type: ignore[assignment]

    def describe(self) -> str:
        out = [
            f"y_hat        = {np.array2string(self.y_hat, precision=6)}",
            f"floor start  = {self.start.astype(int).tolist()}",
            f"binding rows = {self.binding_rows}",
            f"axis order   = {self.axis_order}",
        ]
        for st in self.steps:
            out.append(
                f"  pair {st.pair}: {st.rule} ({st.value:g}) -> {st.point.astype(int).tolist()}"
            )
        out.append(f"lower corner = {self.final.astype(int).tolist()}")
        return "\n".join(out)


def reduce_integer_set(
    W: np.ndarray,
    tau: np.ndarray,
    u: np.ndarray,
    y_hat: np.ndarray,
    probe: bool = True,
    bind_tol: float = BIND_TOL,
) -> ReductionTrace:
    """Compute the lower corner for y_hat; probe=False skips the integer probe.

    Requires W >= 0 elementwise and W y_hat <= tau + bind_tol.  The returned
    corner is itself feasible, so the restricted lattice set is never empty.
    """
    W = np.asarray(W, dtype=float)
    tau = np.asarray(tau, dtype=float)
    u = np.asarray(u, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    m, n = W.shape
    if (W < -1e-12).any():
        raise ValueError("reduction requires a nonnegative recourse matrix")

    ybar = np.floor(y_hat + EPS)
    np.clip(ybar, 0.0, u, out=ybar)
    residual = tau - W @ y_hat
    binding = [k for k in range(m) if residual[k] <= bind_tol]
    col_weight = W[binding].sum(axis=0) if binding else np.zeros(n)
    order = sorted(range(n), key=lambda i: (col_weight[i], i))

    trace = ReductionTrace(
        y_hat=y_hat.copy(),
        start=ybar.copy(),
        axis_order=order,
        binding_rows=binding,
    )
    if not binding or not ybar.any():
        # every rule only lowers the corner, so an all-zero floor is final
        trace.final = ybar
        return trace

    Wb = W[binding]
    resb = residual[binding]

    def ratio(i: int, j: int, f: np.ndarray) -> float:
        d = u[j] - ybar[j]
        wj = Wb[:, j]
        live = wj > EPS
        if live.any():
            d = min(d, float(np.min((f[live] - Wb[live, i] * ybar[i]) / wj[live])) - ybar[j])
        return d

    for i in order:
        for j in range(n):
            if j == i or (ybar[i] < 1.0 and ybar[j] < 1.0):
                continue
            # row capacity left for the pair, other axes pinned at y_hat
            f = resb + Wb[:, i] * y_hat[i] + Wb[:, j] * y_hat[j]
            while True:
                d = ratio(i, j, f)
                if d >= 1.0 - EPS:
                    break
                if ybar[i] >= 1.0:
                    ybar[i] -= 1.0
                    trace.steps.append(ReductionStep((i, j), "ratio-first", d, ybar.copy()))
                elif ybar[j] >= 1.0:
                    ybar[j] -= 1.0
                    trace.steps.append(ReductionStep((i, j), "ratio-second", d, ybar.copy()))
                else:
                    break
            if not probe:
                continue
            while True:
                fired = False
                for kb in range(len(binding)):
                    if Wb[kb, j] <= EPS:
                        continue
                    b = 1.0
                    while ybar[i] - b > ybar[j]:
                        r = f[kb] - Wb[kb, i] * ybar[i]
                        r2 = f[kb] - Wb[kb, i] * (ybar[i] - b)
                        gain = _floor(r2 / Wb[kb, j]) - _floor(r / Wb[kb, j])
                        if gain >= 1.0 and _floor(r2 / Wb[kb, j]) <= u[j] + EPS:
                            ybar[i] -= b
                            trace.steps.append(ReductionStep((i, j), "probe", b, ybar.copy()))
                            fired = True
                            break
                        b += 1.0
                    if fired:
                        break
                if not fired:
                    break

    # the corner only ever moved down from a feasible floor, so it stays feasible
    if (W @ ybar > tau + 1e-6).any() or (ybar < -1e-9).any():
        raise AssertionError("reduction produced an infeasible corner")
    trace.final = ybar
    return trace
