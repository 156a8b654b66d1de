"""Tests for the knapsack instance generator."""

import numpy as np
import pytest

from fendec.gen import GenConfig, config_from_name, generate, instance_name
from fendec.model import build_dep, write_sipx


def test_reference_shape_dep_dimensions():
    cfg = GenConfig(n1=10, n2=20, m1=10, m2=20, scenarios=50, seed=11)
    dep = build_dep(generate(cfg))
    assert dep.problem.num_vars == 1010
    assert dep.problem.num_rows == 1010
    assert dep.integer_mask.all()
    # first n1 columns are binary, the rest bounded by v_ub
    assert (dep.problem.upper[:10] == 1.0).all()
    assert (dep.problem.upper[10:] == 5.0).all()


def test_regeneration_is_byte_identical(tmp_path):
    cfg = GenConfig(n1=6, n2=8, m1=4, m2=6, scenarios=7, seed=99, tag="c")
    a, b = tmp_path / "a.sipx", tmp_path / "b.sipx"
    write_sipx(generate(cfg), a)
    write_sipx(generate(cfg), b)
    assert a.read_bytes() == b.read_bytes()


def test_replication_tags_differ():
    base = GenConfig(n1=5, n2=5, m1=3, m2=4, scenarios=3, seed=4, tag="a")
    other = GenConfig(n1=5, n2=5, m1=3, m2=4, scenarios=3, seed=4, tag="b")
    pa, pb = generate(base), generate(other)
    assert not np.array_equal(pa.first.c, pb.first.c)
    assert pa.name.endswith("a") and pb.name.endswith("b")


def test_adding_scenarios_keeps_earlier_ones():
    small = generate(GenConfig(n1=4, n2=6, m1=3, m2=4, scenarios=5, seed=21))
    large = generate(GenConfig(n1=4, n2=6, m1=3, m2=4, scenarios=9, seed=21))
    for s in range(5):
        assert np.array_equal(small.scenarios[s].q, large.scenarios[s].q)
        assert np.array_equal(small.scenarios[s].h, large.scenarios[s].h)
        assert np.array_equal(small.scenarios[s].T, large.scenarios[s].T)


def test_distribution_ranges_and_row_structure():
    cfg = GenConfig(n1=8, n2=10, m1=5, m2=7, scenarios=12, seed=3, tag="e")
    prog = generate(cfg)
    assert prog.validate() == []
    assert ((prog.second.W >= 2.0) & (prog.second.W <= 8.0)).all()
    assert (prog.second.u == 5.0).all()
    assert ((prog.first.c >= 0.0) & (prog.first.c <= 1500.0)).all()
    assert (prog.first.A[0] == 1.0).all() and prog.first.b[0] == 4.0
    assert ((prog.first.A[1:] >= 2.0) & (prog.first.A[1:] <= 8.0)).all()
    coupling = 4  # ceil(7/2)
    for sc in prog.scenarios:
        assert sc.p == pytest.approx(1.0 / 12)
        assert ((sc.q >= 10.0) & (sc.q <= 20.0)).all()
        assert (sc.h[:coupling] == 0.0).all()
        for r in range(coupling):
            entries = set(np.unique(sc.T[r]))
            assert entries <= {0.0, -10.0} and -10.0 in entries
        assert (sc.T[coupling:] == 0.0).all()
        for r in range(coupling, 7):
            w_max = prog.second.W[r].max()
            assert 2.0 + 2.0 * w_max * 5 <= sc.h[r] <= 4.0 * w_max * 5


def test_tender_nonnegative_for_every_binary_x():
    prog = generate(GenConfig(n1=5, n2=6, m1=3, m2=4, scenarios=4, seed=8))
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = (rng.uniform(size=5) < 0.5).astype(float)
        for s in range(4):
            assert (prog.tender(s, x) >= -1e-12).all()


def test_name_round_trip_and_rejects():
    cfg = config_from_name("k.10.30.150d", seed=5)
    assert (cfg.n1, cfg.n2, cfg.m1, cfg.m2, cfg.scenarios, cfg.tag) == (10, 30, 10, 30, 150, "d")
    assert instance_name(cfg) == "k.10.30.150d"
    assert config_from_name("k.4.6.20").tag == "a"
    for bad in ("j.10.20.50", "k.10.20", "k.a.b.c"):
        with pytest.raises(ValueError):
            config_from_name(bad)


def test_config_check_rejects_bad_fields():
    for bad in (
        GenConfig(n1=0),
        GenConfig(v_ub=0),
        GenConfig(tag="z"),
        GenConfig(coupling_scale=0.0),
    ):
        with pytest.raises(ValueError):
            generate(bad)
