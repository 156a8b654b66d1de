"""Random two-stage multidimensional knapsack instances.

Family naming follows k.{n1}.{n2}.{S} plus a replication letter a-e, e.g.
k.10.20.50a.  The first stage picks binary items under one cardinality row
(sum x <= ceil(n1/2)) and m1 - 1 random knapsack rows.  Each scenario's
second stage mixes two row kinds over the shared weight matrix W (entries
U(2,8)): coupling rows, where capacity is released only by selected
first-stage items (h = 0, T entries -coupling_scale on a Bernoulli(1/2)
pattern, resampled if empty), and pure knapsack rows with a tightened
random capacity U(2 + 2*Wmax*v_ub, 4*Wmax*v_ub).  Costs are U(0, 1500)
first stage and U(10, 20) second stage; scenarios are equiprobable; every
second-stage variable shares the integer upper bound v_ub.  Tenders stay
nonnegative for every binary x by construction, so generated instances
always validate cleanly.

Randomness is drawn from one counter-based bit generator (Philox) keyed by
(seed, replication, component, scenario, row), so every component has its
own stream: regeneration is byte identical, and changing the scenario
count never perturbs the scenarios already drawn.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from fendec.model import FirstStage, Scenario, SecondStage, StochasticProgram

TAGS = "abcde"

# component codes for stream keying
_C_COST = 0
_C_ROW = 1
_C_RHS = 2
_C_WEIGHTS = 3
_C_RECOURSE_COST = 4
_C_PATTERN = 5
_C_CAPACITY = 6


@dataclass(frozen=True)
class GenConfig:
    """Shape and seeding of one generated instance."""

    n1: int = 10
    n2: int = 20
    m1: int = 10
    m2: int = 20
    scenarios: int = 50
    v_ub: int = 5  # shared integer upper bound on second-stage variables
    coupling_scale: float = 10.0  # capacity released per selected first-stage item
    seed: int = 0
    tag: str = "a"  # replication letter

    def check(self) -> None:
        if min(self.n1, self.n2, self.m2, self.scenarios) < 1 or self.m1 < 1:
            raise ValueError("all dimensions and the scenario count must be >= 1")
        if self.v_ub < 1:
            raise ValueError("v_ub must be a positive integer")
        if self.coupling_scale <= 0:
            raise ValueError("coupling_scale must be positive")
        if self.tag not in TAGS:
            raise ValueError(f"replication tag must be one of {TAGS!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def instance_name(cfg: GenConfig) -> str:
    return f"k.{cfg.n1}.{cfg.n2}.{cfg.scenarios}{cfg.tag}"


def config_from_name(name: str, seed: int = 0, **overrides) -> GenConfig:
    """Parse 'k.10.20.50a' back into a GenConfig (m1 = n1, m2 = n2)."""
    parts = name.strip().split(".")
    if len(parts) != 4 or parts[0] != "k":
        raise ValueError(f"instance name {name!r} does not match k.<n1>.<n2>.<S><tag>")
    tail = parts[3]
    tag = "a"
    if tail and tail[-1] in TAGS:
        tag, tail = tail[-1], tail[:-1]
    try:
        n1, n2, scen = int(parts[1]), int(parts[2]), int(tail)
    except ValueError as exc:
        raise ValueError(f"instance name {name!r} has a non-numeric field") from exc
    cfg = GenConfig(n1=n1, n2=n2, m1=n1, m2=n2, scenarios=scen, seed=seed, tag=tag)
    return replace(cfg, **overrides) if overrides else cfg


def _stream(cfg: GenConfig, component: int, scenario: int, row: int) -> np.random.Generator:
    """Independent draw stream per (seed, replication, component, scenario, row)."""
    rep = TAGS.index(cfg.tag)
    word = np.uint64(
        (rep << 56) | (component << 48) | ((scenario & 0xFFFFFFFF) << 16) | (row & 0xFFFF)
    )
    key = np.array([np.uint64(cfg.seed), word], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _tight_capacity(rng: np.random.Generator, weights: np.ndarray, bound: int) -> float:
    """Capacity drawn against the row's largest weight so the row binds."""
    w_max = float(weights.max())
    return float(rng.uniform(2.0 + 2.0 * w_max * bound, 4.0 * w_max * bound))


def generate(cfg: GenConfig) -> StochasticProgram:
    """Draw the instance described by cfg; same cfg always gives the same bytes."""
    cfg.check()
    n1, n2, m1, m2, S = cfg.n1, cfg.n2, cfg.m1, cfg.m2, cfg.scenarios

    c = _stream(cfg, _C_COST, 0, 0).uniform(0.0, 1500.0, n1)
    A = np.zeros((m1, n1))
    b = np.zeros(m1)
    A[0] = 1.0
    b[0] = float(np.ceil(n1 / 2))
    for r in range(1, m1):
        A[r] = _stream(cfg, _C_ROW, 0, r).uniform(2.0, 8.0, n1)
        b[r] = _tight_capacity(_stream(cfg, _C_RHS, 0, r), A[r], 1)  # x is binary

    W = np.vstack([_stream(cfg, _C_WEIGHTS, 0, r).uniform(2.0, 8.0, n2) for r in range(m2)])
    u = np.full(n2, float(cfg.v_ub))
    coupling_rows = int(np.ceil(m2 / 2))

    scenarios = []
    for s in range(S):
        q = _stream(cfg, _C_RECOURSE_COST, s, 0).uniform(10.0, 20.0, n2)
        h = np.zeros(m2)
        T = np.zeros((m2, n1))
        for r in range(coupling_rows):
            rng = _stream(cfg, _C_PATTERN, s, r)
            pattern = rng.uniform(size=n1) < 0.5
            while not pattern.any():  # a coupling row must involve some item
                pattern = rng.uniform(size=n1) < 0.5
            T[r] = -cfg.coupling_scale * pattern
        for r in range(coupling_rows, m2):
            h[r] = _tight_capacity(_stream(cfg, _C_CAPACITY, s, r), W[r], cfg.v_ub)
        scenarios.append(Scenario(p=1.0 / S, q=q, h=h, T=T))

    return StochasticProgram(
        first=FirstStage(c=c, A=A, b=b),
        second=SecondStage(W=W, u=u),
        scenarios=scenarios,
        name=instance_name(cfg),
    )
