import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cheaptalk import _kernels as K
from cheaptalk.engine import (
    ConfigError, PopulationState, RunConfig, TopologySpec, elementary_update, fermi_prob,
    initial_state, mcs, measure, read_snapshot_csv, read_timeseries_csv, run, total_payoff,
    write_snapshot_csv, write_timeseries_csv,
)
from cheaptalk.game import GameParams, payoff_table
from cheaptalk.network import (
    build_lattice, build_random_regular, build_scale_free, build_well_mixed, from_edges,
)
from cheaptalk.strategy import ACC, ACD, NDC, NDD
from oracles import brute_force_coop, brute_force_payoff, reference_updates

P = GameParams(r=0.02, gamma=0.1, beta=10.0, mu=0.0)
TABLE = payoff_table(P)


def state(strategies, seed=0):
    return PopulationState(np.asarray(strategies, dtype=np.int8),
                           np.random.Generator(np.random.Philox(seed)))


def gen(seed):
    return np.random.Generator(np.random.Philox(seed))


# -- payoffs -----------------------------------------------------------------

def test_total_payoff_examples():
    net = build_lattice(5)
    assert total_payoff(3, state(np.full(25, NDD)), net, TABLE) == 0.0
    assert total_payoff(3, state(np.full(25, ACC)), net, TABLE) == pytest.approx(4.0)
    s = np.full(25, NDD)
    s[12] = ACD
    assert total_payoff(12, state(s), net, TABLE) == pytest.approx(-0.4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=25, max_size=25), st.integers(0, 24))
def test_total_payoff_matches_brute_force(strats, i):
    net = build_lattice(5)
    got = total_payoff(i, state(strats), net, TABLE)
    assert got == pytest.approx(brute_force_payoff(i, strats, net.edges(), 0.02, 0.1), abs=1e-12)


def test_payoffs_are_not_degree_normalised():
    net = build_scale_free(200, 2, np.random.default_rng(0))
    hub = int(np.argmax(net.degrees))
    s = state(np.full(200, ACC))
    assert total_payoff(hub, s, net, TABLE) == pytest.approx(float(net.degrees[hub]))


# -- Fermi rule --------------------------------------------------------------

def test_fermi_examples():
    assert fermi_prob(1.3, 1.3, 10) == 0.5
    assert fermi_prob(0.1, 0.0, 10) == pytest.approx(1 / (1 + math.e), rel=1e-12)
    assert fermi_prob(0.1, 0.0, 10) == pytest.approx(0.26894, abs=1e-5)
    assert fermi_prob(-10.0, 0.0, 10) >= 1 - math.exp(-100)
    assert fermi_prob(0.0, 2.98, 10) == pytest.approx(1 / (1 + math.exp(-29.8)), rel=1e-12)
    assert fermi_prob(0.0, 2.98, 10) > 1 - 1e-12


def test_fermi_no_overflow():
    assert fermi_prob(1e6, 0.0, 10) == pytest.approx(1 / (1 + math.exp(500)))
    assert fermi_prob(-1e6, 0.0, 10) == 1.0
    with pytest.raises(ValueError):
        fermi_prob(0, 0, -1)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0.01, 20))
def test_fermi_monotone(d1, d2, beta):
    if d1 == d2:
        return
    lo, hi = sorted((d1, d2))
    # strictly decreasing unless both saturate in double precision
    assert fermi_prob(lo, 0, beta) >= fermi_prob(hi, 0, beta)
    if abs(beta * lo) < 30 and abs(beta * hi) < 30 and beta * (hi - lo) > 1e-9:
        assert fermi_prob(lo, 0, beta) > fermi_prob(hi, 0, beta)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_fermi_zero_beta(a, b):
    assert fermi_prob(a, b, 0.0) == 0.5


# -- elementary updates ------------------------------------------------------

def test_monomorphic_is_absorbing_without_exploration():
    net = build_lattice(6)
    for strat in range(8):
        st_ = state(np.full(36, strat), seed=strat)
        mcs(st_, net, TABLE, P, n_steps=50)
        assert np.all(st_.strategies == strat)
        assert st_.t == 50


def test_imitation_of_rich_neighbour():
    # NDD focal (13) touching one corner of an ACC cluster; j = 14 has 3 ACC neighbours
    net = build_lattice(6)
    s = np.full(36, NDD)
    s[[14, 15, 8, 20]] = ACC
    st_ = state(s)
    phi_i = total_payoff(13, st_, net, TABLE)
    phi_j = total_payoff(14, st_, net, TABLE)
    assert phi_i == pytest.approx(1.02)
    assert phi_j == pytest.approx(2.98)
    assert fermi_prob(phi_i, phi_j, 10.0) > 1 - 1e-8
    assert fermi_prob(0.0, 2.98, 10.0) == pytest.approx(1 / (1 + math.exp(-29.8)), rel=1e-12)


def test_fresh_payoffs_hand_traced():
    """4-node path 0-1-2-3, mu=0, driven by a scripted stream of draws.

    Node 1 (NDD) copies node 2 (ACC) only if payoffs are evaluated on the
    state at that instant: after node 0 has just become ACC, node 1 earns
    T from both sides, which changes the Fermi probability.
    """
    net = from_edges(4, [(0, 1), (1, 2), (2, 3)], "custom")
    s = state([NDD, NDD, ACC, ACC])
    phi1 = total_payoff(1, s, net, TABLE)
    phi2 = total_payoff(2, s, net, TABLE)
    assert phi1 == pytest.approx(1.02)
    assert phi2 == pytest.approx(-0.02 + 1.0)
    s.strategies[0] = ACC
    phi1_new = total_payoff(1, s, net, TABLE)
    assert phi1_new == pytest.approx(2.04)
    assert fermi_prob(phi1_new, phi2, 10) == pytest.approx(1 / (1 + math.exp(10 * (2.04 - 0.98))))


def test_kernel_matches_reference_stepper():
    net = build_lattice(5)
    edges = [tuple(e) for e in net.edges()]
    for seed, mu in [(1, 0.0), (2, 0.05), (3, 0.5)]:
        init = np.random.default_rng(seed).integers(0, 8, 25)
        st_ = state(init, seed)
        p = GameParams(r=0.02, gamma=0.1, beta=10.0, mu=mu)
        mcs(st_, net, payoff_table(p), p, n_steps=40)
        ref = reference_updates(init, edges, 0.02, 0.1, mu, 10.0, 40 * 25, gen(seed))
        np.testing.assert_array_equal(st_.strategies, ref)


def test_elementary_update_single_draw_sequence():
    net = build_lattice(4)
    init = np.arange(16) % 8
    st_ = state(init, 9)
    p = GameParams(r=0.02, gamma=0.1, beta=10.0, mu=0.3)
    for _ in range(30):
        elementary_update(st_, net, payoff_table(p), p)
    ref = reference_updates(init, [tuple(e) for e in net.edges()], 0.02, 0.1, 0.3, 10.0, 30, gen(9))
    np.testing.assert_array_equal(st_.strategies, ref)


def test_isolated_node_imitation_is_noop():
    net = from_edges(3, [(0, 1)], "custom")
    st_ = state([ACC, NDD, NDC])
    for _ in range(200):
        elementary_update(st_, net, TABLE, P)
    assert st_.strategies[2] == NDC


def test_mcs_performs_n_updates():
    # with mu = 1 each update draws (focal, r1, new strategy)
    net = build_lattice(5)
    p = GameParams(mu=1.0)
    st_ = state(np.zeros(25), 4)
    mcs(st_, net, payoff_table(p), p, n_steps=3)
    g = gen(4)
    for _ in range(3 * 25):
        g.integers(0, 25)
        g.random()
        g.integers(0, 8)
    assert st_.rng.random() == g.random()


def test_complete_graph_fast_path_matches_generic():
    net = build_well_mixed(30)
    p = GameParams(r=0.02, gamma=0.1, beta=1.0, mu=0.01)
    table = payoff_table(p)
    init = np.random.default_rng(0).integers(0, 8, 30).astype(np.int8)
    a = init.copy()
    b = init.copy()
    K.advance(a, net.indptr, net.indices, table, p.mu, p.beta, 3000, gen(5))
    K.advance_complete(b, K.count_strategies(b), table, p.mu, p.beta, 3000, gen(5))
    np.testing.assert_array_equal(a, b)


# -- measurement -------------------------------------------------------------

def test_measure_examples():
    net = build_lattice(4)
    rec = measure(state(np.full(16, ACC)), net)
    assert rec.coop == 1.0 and rec.freq[ACC] == 1.0
    assert measure(state(np.full(16, NDD)), net).coop == 0.0
    rows, cols = np.divmod(np.arange(16), 4)
    checker = np.where((rows + cols) % 2 == 0, ACC, NDD)
    assert measure(state(checker), net).coop == 0.5


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_coop_matches_double_loop(data):
    n = data.draw(st.integers(3, 20))
    seed = data.draw(st.integers(0, 1000))
    net = build_random_regular(n if n % 2 == 0 else n + 1, 2, np.random.default_rng(seed))
    strats = data.draw(st.lists(st.integers(0, 7), min_size=net.n, max_size=net.n))
    rec = measure(state(strats), net)
    assert rec.coop == pytest.approx(brute_force_coop(strats, net.edges()), abs=1e-15)
    assert rec.freq.sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=12, max_size=12))
def test_complete_graph_coop_count_formula(strats):
    net = build_well_mixed(12)
    assert measure(state(strats), net).coop == pytest.approx(brute_force_coop(strats, net.edges()), abs=1e-15)


# -- run ---------------------------------------------------------------------

def small(**kw):
    base = dict(params=GameParams(r=0.02, gamma=0.1, beta=10.0, mu=1e-3),
                topology=TopologySpec("lattice", L=10), t_max=200, t_avg=50, seed=3)
    base.update(kw)
    return RunConfig(**base)


def test_run_absorbing_all_ndd():
    res = run(small(params=GameParams(mu=0.0), init="all_NDD"))
    assert res.summary["mean_coop"] == 0.0
    assert np.all(res.coop == 0)


def test_run_records_and_window():
    res = run(small(record_interval=7))
    assert res.t[0] == 0 and res.t[-1] == 200
    assert np.all(np.diff(res.t) > 0)
    np.testing.assert_allclose(res.freq.sum(axis=1), 1.0, atol=1e-12)
    assert np.all((res.coop >= 0) & (res.coop <= 1))
    window = res.t > 150
    assert res.summary["n_records"] == window.sum()
    assert res.summary["mean_coop"] == pytest.approx(res.coop[window].mean())
    assert len(res.records) == len(res.t)


def test_run_is_deterministic():
    a = run(small())
    b = run(small())
    np.testing.assert_array_equal(a.freq, b.freq)
    np.testing.assert_array_equal(a.coop, b.coop)
    c = run(small(seed=4))
    assert not np.array_equal(a.coop, c.coop)


def test_run_snapshots():
    res = run(small(snapshot_times=[0, 100, 200], init="all_NDD"))
    assert sorted(res.snapshots) == [0, 100, 200]
    assert np.all(res.snapshots[0] == NDD)
    assert res.snapshots[200].shape == (10, 10)


def test_snapshot_does_not_change_trajectory():
    a = run(small())
    b = run(small(snapshot_times=[33, 77]))
    np.testing.assert_array_equal(a.coop, b.coop)


def test_run_well_mixed_fast_path():
    cfg = small(topology=TopologySpec("well_mixed", n=40, L=None), t_max=50, t_avg=10)
    res = run(cfg)
    np.testing.assert_allclose(res.freq.sum(axis=1), 1.0)


@pytest.mark.parametrize("kind", ["lattice", "small_world", "random_regular", "well_mixed", "scale_free"])
def test_uniformization(kind):
    n = 400
    topo = TopologySpec(kind, L=20) if kind == "lattice" else TopologySpec(kind, n=n, L=None)
    res = run(RunConfig(GameParams(r=0.02, gamma=0.1, mu=1.0), topo, t_max=2000, t_avg=1500,
                        seed=11, record_interval=5))
    assert np.all(np.abs(np.asarray(res.summary["mean_freq"]) - 1 / 8) < 0.02)
    assert abs(res.summary["mean_coop"] - 0.5) < 0.03


@pytest.mark.parametrize("kw", [
    dict(t_avg=300), dict(record_interval=0), dict(seed=-1), dict(init="all_XYZ"),
    dict(init="random"), dict(init=[0] * 5), dict(snapshot_times=[500]),
    dict(topology=TopologySpec("scale_free", n=100, L=None), snapshot_times=[10]),
])
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        small(**kw)


def test_topology_spec_errors():
    with pytest.raises(ConfigError):
        TopologySpec("hexagonal")
    with pytest.raises(ConfigError):
        TopologySpec("scale_free", n=None, L=None)


def test_fixed_init():
    init = [ACC, NDD] * 50
    res = run(small(init=init, params=GameParams(mu=0.0), t_max=0, t_avg=0))
    assert res.freq[0][ACC] == 0.5


def test_initial_state_uniform():
    cfg = small()
    s = initial_state(cfg, 100_000, gen(0))
    counts = np.bincount(s.strategies, minlength=8)
    assert np.all(np.abs(counts - 12_500) < 4 * np.sqrt(100_000 / 8 * 7 / 8))


def test_csv_roundtrip(tmp_path):
    res = run(small(snapshot_times=[10]))
    p = tmp_path / "ts.csv"
    write_timeseries_csv(res, p)
    header = p.read_text().splitlines()[0]
    assert header == "t,freq_ACC,freq_ACD,freq_ADC,freq_ADD,freq_NCC,freq_NCD,freq_NDC,freq_NDD,coop"
    t, freq, coop = read_timeseries_csv(p)
    np.testing.assert_array_equal(t, res.t)
    np.testing.assert_array_equal(freq, res.freq)
    np.testing.assert_array_equal(coop, res.coop)
    g = tmp_path / "snap.csv"
    write_snapshot_csv(res.snapshots[10], g)
    np.testing.assert_array_equal(read_snapshot_csv(g), res.snapshots[10])


def test_metadata_echoes_config():
    res = run(small())
    meta = res.metadata()
    assert meta["seed"] == 3
    assert "Philox" in meta["rng_algorithm"]
    assert meta["config"]["params"]["mu"] == 1e-3
    assert meta["network"]["n_edges"] == 200
