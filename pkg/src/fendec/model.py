"""Problem data for two-stage stochastic integer programs with binary first stage.

The program solved throughout the package is

    max  c.x + sum_s p_s * max{ q_s.y : W y <= h_s - T_s x, 0 <= y <= u, y int }
    s.t. A x <= b,  x binary,

under standing assumptions the package relies on throughout:

    A1  finitely many scenarios, probabilities positive and summing to one
    A2  the first-stage feasible set {x binary : A x <= b} is nonempty
    A3  the recourse matrix W is elementwise nonnegative
    A4  every scenario subproblem is feasible and bounded: upper bounds u
        are finite integers >= 1, and tenders h_s - T_s x stay nonnegative
        so y = 0 is always available
    A5  the scenario feasible sets are full dimensional (not checked)

``validate`` reports violations of the checkable ones as findings rather
than raising; A2/A4 feasibility is probed structurally at the two corners
x = 0 and x = 1 and reported as warnings.  Nonnegative W plus nonnegative
tenders make every scenario's feasible set downward closed, which the
reduction and rounding steps elsewhere in the package rely on.

Also here: the deterministic-equivalent expansion (one block of integer
recourse variables per scenario) and a plain text serialization (SIPX) that
round-trips instances exactly via repr of each float.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fendec.lp import LpProblem


@dataclass
class FirstStage:
    """Objective c, constraint rows A x <= b; x is binary of size len(c)."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.asarray(self.A, dtype=float).reshape(-1, self.c.size)
        self.b = np.asarray(self.b, dtype=float)


@dataclass
class SecondStage:
    """Recourse rows W y <= tender, integer bounds 0 <= y <= u (scenario-free)."""

    W: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        self.u = np.asarray(self.u, dtype=float)


@dataclass
class Scenario:
    """One realization: probability p, objective q, tender pieces h and T."""

    p: float
    q: np.ndarray
    h: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        self.p = float(self.p)
        self.q = np.asarray(self.q, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        self.T = np.asarray(self.T, dtype=float)


@dataclass
class StochasticProgram:
    first: FirstStage
    second: SecondStage
    scenarios: list[Scenario]
    name: str = ""

    @property
    def n1(self) -> int:
        return self.first.c.size

    @property
    def n2(self) -> int:
        return self.second.u.size

    @property
    def m1(self) -> int:
        return self.first.A.shape[0]

    @property
    def m2(self) -> int:
        return self.second.W.shape[0]

    @property
    def num_scenarios(self) -> int:
        return len(self.scenarios)

    def validate(self) -> list[str]:
        """Findings against the standing assumptions; an empty list means valid.

        Hard violations come first; entries starting with "warning:" flag a
        negative tender at a corner of the binary cube (data is well formed
        but the downward-closure guarantees are void there).
        """
        out: list[str] = []
        n1, n2, m1, m2 = self.n1, self.n2, self.m1, self.m2
        if self.first.b.shape != (m1,):
            out.append("first-stage rhs length does not match row count")
        if self.second.W.shape != (m2, n2):
            out.append("recourse matrix shape does not match bounds")
        if not self.scenarios:
            out.append("at least one scenario is required (A1)")
            return out
        total_p = 0.0
        for i, sc in enumerate(self.scenarios):
            if sc.p <= 0:
                out.append(f"scenario {i} has nonpositive probability (A1)")
            total_p += sc.p
            if sc.q.shape != (n2,):
                out.append(f"scenario {i}: objective length != {n2}")
            if sc.h.shape != (m2,):
                out.append(f"scenario {i}: tender length != {m2}")
            if sc.T.shape != (m2, n1):
                out.append(f"scenario {i}: coupling matrix shape != ({m2},{n1})")
        if abs(total_p - 1.0) > 1e-9:
            out.append(f"scenario probabilities sum to {total_p!r}, not 1 (A1)")
        if (self.second.W < 0).any():
            out.append("recourse matrix has a negative entry (A3)")
        u = self.second.u
        if not np.isfinite(u).all() or (u < 1).any() or (u != np.floor(u)).any():
            out.append("second-stage upper bounds must be finite integers >= 1 (A4)")
        if out:
            return out
        for label, x in (("zeros", np.zeros(n1)), ("ones", np.ones(n1))):
            for i in range(len(self.scenarios)):
                if (self.tender(i, x) < -1e-9).any():
                    out.append(
                        f"warning: scenario {i} tender is negative at x = all-{label}; "
                        "recourse feasibility is not guaranteed (A4)"
                    )
                    break
        return out

    def tender(self, s: int, x: np.ndarray) -> np.ndarray:
        """Right-hand side h_s - T_s x of scenario s at first-stage point x."""
        sc = self.scenarios[s]
        return sc.h - sc.T @ np.asarray(x, dtype=float)


def ensure_valid(program: StochasticProgram) -> None:
    """Raise ValueError on hard validate findings (warnings pass)."""
    findings = [f for f in program.validate() if not f.startswith("warning:")]
    if findings:
        raise ValueError("; ".join(findings))


def subproblem_data(program: StochasticProgram, x: np.ndarray, s: int):
    """Objective and right-hand side (q_s, h_s - T_s x) of scenario s at x."""
    return program.scenarios[s].q, program.tender(s, x)


def second_stage_lp(program: StochasticProgram, s: int, x: np.ndarray) -> LpProblem:
    """Relaxed scenario subproblem at x: max q_s.y, W y <= tender, 0 <= y <= u."""
    return LpProblem(
        objective=program.scenarios[s].q,
        rows=program.second.W,
        rhs=program.tender(s, x),
        lower=np.zeros(program.n2),
        upper=program.second.u,
    )


def recourse_value_bounds(program: StochasticProgram) -> tuple[float, float]:
    """Safe finite box for the expected-recourse variable in master problems.

    Every scenario value lies in [-sum max(-q,0).u, sum max(q,0).u]; the
    expectation inherits the probability-weighted versions, padded by one.
    """
    lo = 0.0
    hi = 0.0
    u = program.second.u
    for sc in program.scenarios:
        hi += sc.p * float(np.maximum(sc.q, 0.0) @ u)
        lo -= sc.p * float(np.maximum(-sc.q, 0.0) @ u)
    return lo - 1.0, hi + 1.0


@dataclass
class DepModel:
    """Deterministic equivalent: columns are x then one y-block per scenario."""

    problem: LpProblem
    integer_mask: np.ndarray
    n1: int
    n2: int
    num_scenarios: int

    def split(self, x_full: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        x = x_full[: self.n1]
        ys = [
            x_full[self.n1 + s * self.n2 : self.n1 + (s + 1) * self.n2]
            for s in range(self.num_scenarios)
        ]
        return x, ys


def build_dep(program: StochasticProgram) -> DepModel:
    """Expand the program into one flat integer problem.

    Layout: n1 + S*n2 columns, m1 + S*m2 rows; scenario s contributes rows
    T_s x + W y_s <= h_s and objective weight p_s q_s on its block.
    """
    n1, n2 = program.n1, program.n2
    m1, m2 = program.m1, program.m2
    S = program.num_scenarios
    ncols = n1 + S * n2
    obj = np.zeros(ncols)
    obj[:n1] = program.first.c
    rows = np.zeros((m1 + S * m2, ncols))
    rhs = np.zeros(m1 + S * m2)
    rows[:m1, :n1] = program.first.A
    rhs[:m1] = program.first.b
    lower = np.zeros(ncols)
    upper = np.empty(ncols)
    upper[:n1] = 1.0
    for s, sc in enumerate(program.scenarios):
        c0 = n1 + s * n2
        r0 = m1 + s * m2
        obj[c0 : c0 + n2] = sc.p * sc.q
        rows[r0 : r0 + m2, :n1] = sc.T
        rows[r0 : r0 + m2, c0 : c0 + n2] = program.second.W
        rhs[r0 : r0 + m2] = sc.h
        upper[c0 : c0 + n2] = program.second.u
    problem = LpProblem(objective=obj, rows=rows, rhs=rhs, lower=lower, upper=upper)
    return DepModel(
        problem=problem,
        integer_mask=np.ones(ncols, dtype=bool),
        n1=n1,
        n2=n2,
        num_scenarios=S,
    )


# ---------------------------------------------------------------------------
# SIPX plain-text format
#
#   SIPX 1
#   NAME <token>            (optional)
#   FIRSTSTAGE <n1> <m1>
#   C <n1 numbers>
#   A <n1 numbers>          (m1 lines, one per row)
#   B <m1 numbers>
#   SECONDSTAGE <n2> <m2>
#   W <n2 numbers>          (m2 lines)
#   U <n2 numbers>
#   SCENARIOS <S>
#   SCEN <p>
#   Q <n2 numbers>
#   H <m2 numbers>
#   T <n1 numbers>          (m2 lines)
#   ENDSCEN                 (block repeated S times)
#
# '#' starts a comment; blank lines are ignored.  Numbers are written with
# repr() so a write/read cycle reproduces every float bit for bit.
# ---------------------------------------------------------------------------


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.atleast_1d(values))


def write_sipx(program: StochasticProgram, path) -> None:
    lines = ["SIPX 1"]
    if program.name:
        lines.append(f"NAME {program.name}")
    lines.append(f"FIRSTSTAGE {program.n1} {program.m1}")
    lines.append("C " + _fmt(program.first.c))
    for row in program.first.A:
        lines.append("A " + _fmt(row))
    lines.append("B " + _fmt(program.first.b))
    lines.append(f"SECONDSTAGE {program.n2} {program.m2}")
    for row in program.second.W:
        lines.append("W " + _fmt(row))
    lines.append("U " + _fmt(program.second.u))
    lines.append(f"SCENARIOS {program.num_scenarios}")
    for sc in program.scenarios:
        lines.append(f"SCEN {sc.p!r}")
        lines.append("Q " + _fmt(sc.q))
        lines.append("H " + _fmt(sc.h))
        for row in sc.T:
            lines.append("T " + _fmt(row))
        lines.append("ENDSCEN")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class SipxError(ValueError):
    pass


def read_sipx(path) -> StochasticProgram:
    with open(path) as fh:
        raw = fh.readlines()
    lines = []
    for ln in raw:
        ln = ln.split("#", 1)[0].strip()
        if ln:
            lines.append(ln)
    pos = 0

    def take(expect: str | None = None) -> list[str]:
        nonlocal pos
        if pos >= len(lines):
            raise SipxError(f"unexpected end of file (wanted {expect or 'a line'})")
        toks = lines[pos].split()
        pos += 1
        if expect is not None and toks[0] != expect:
            raise SipxError(f"expected {expect!r}, found {toks[0]!r} on line {pos}")
        return toks

    def vector(tag: str, size: int) -> np.ndarray:
        toks = take(tag)
        if len(toks) - 1 != size:
            raise SipxError(f"{tag} line has {len(toks) - 1} numbers, expected {size}")
        return np.array([float(t) for t in toks[1:]])

    head = take("SIPX")
    if len(head) != 2 or head[1] != "1":
        raise SipxError("unsupported SIPX version line")
    name = ""
    if pos < len(lines) and lines[pos].split()[0] == "NAME":
        toks = take("NAME")
        name = toks[1] if len(toks) > 1 else ""
    toks = take("FIRSTSTAGE")
    n1, m1 = int(toks[1]), int(toks[2])
    c = vector("C", n1)
    A = np.array([vector("A", n1) for _ in range(m1)]).reshape(m1, n1)
    b = vector("B", m1)
    toks = take("SECONDSTAGE")
    n2, m2 = int(toks[1]), int(toks[2])
    W = np.array([vector("W", n2) for _ in range(m2)]).reshape(m2, n2)
    u = vector("U", n2)
    toks = take("SCENARIOS")
    S = int(toks[1])
    scenarios = []
    for _ in range(S):
        toks = take("SCEN")
        p = float(toks[1])
        q = vector("Q", n2)
        h = vector("H", m2)
        T = np.array([vector("T", n1) for _ in range(m2)]).reshape(m2, n1)
        take("ENDSCEN")
        scenarios.append(Scenario(p=p, q=q, h=h, T=T))
    if pos != len(lines):
        raise SipxError(f"trailing content starting at line {pos + 1}")
    program = StochasticProgram(
        first=FirstStage(c=c, A=A, b=b),
        second=SecondStage(W=W, u=u),
        scenarios=scenarios,
        name=name,
    )
    findings = [f for f in program.validate() if not f.startswith("warning:")]
    if findings:
        raise SipxError("; ".join(findings))
    return program


# format-agnostic aliases for the serialization pair
read_instance = read_sipx
write_instance = write_sipx
