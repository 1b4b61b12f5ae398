import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cheaptalk.network import (
    build, build_lattice, build_random_regular, build_scale_free, build_small_world,
    build_well_mixed, from_edges, load_edgelist,
)


def rng(seed=0):
    return np.random.default_rng(seed)


def assert_simple_symmetric(net):
    e = net.edges()
    assert np.all(e[:, 0] < e[:, 1])
    assert len({tuple(x) for x in e}) == len(e)
    for i in range(net.n):
        nb = net.neighbors(i)
        assert i not in nb
        assert len(set(nb.tolist())) == len(nb)
        for j in nb:
            assert i in net.neighbors(j)
    assert net.degrees.sum() == 2 * net.n_edges


def test_lattice_50():
    net = build_lattice(50)
    assert net.n == 2500 and net.n_edges == 5000
    assert np.all(net.degrees == 4)
    assert net.side == 50


def test_lattice_3():
    net = build_lattice(3)
    assert net.n == 9
    assert np.all(net.degrees == 4)
    assert_simple_symmetric(net)


def test_lattice_torus_neighbours():
    net = build_lattice(4)
    # node (row, col) -> row * 4 + col
    expected = {0 * 4 + 1, 0 * 4 + 3, 1 * 4 + 0, 3 * 4 + 0}
    assert set(net.neighbors(0).tolist()) == expected


@pytest.mark.parametrize("L", [0, 2])
def test_lattice_too_small(L):
    with pytest.raises(ValueError):
        build_lattice(L)


def test_small_world_zero_rewire_is_ring():
    net = build_small_world(2500, 4, 0.0, rng())
    assert np.all(net.degrees == 4)
    assert set(net.neighbors(0).tolist()) == {1, 2, 2498, 2499}


@pytest.mark.parametrize("p", [0.1, 1.0])
def test_small_world_edge_count(p):
    net = build_small_world(2500, 4, p, rng(3))
    assert net.n_edges == 5000
    assert net.degrees.mean() == 4
    if p == 1.0:
        assert net.degrees.var() > 0


def test_small_world_degree_variance_over_seeds():
    assert all(build_small_world(2500, 4, 1.0, rng(s)).degrees.var() > 0 for s in range(3))


def test_small_world_infeasible_rewire_counted():
    # k = n - 1 would be odd here; n=5, k=4 is a complete graph so no target exists
    net = build_small_world(5, 4, 1.0, rng())
    assert net.info["rewire_failures"] == 10
    assert net.n_edges == 10


@pytest.mark.parametrize("n, k", [(1, 2), (4, 4), (10, 3), (10, 0)])
def test_small_world_bad_args(n, k):
    with pytest.raises(ValueError):
        build_small_world(n, k, 0.1, rng())


def test_random_regular_degrees():
    net = build_random_regular(2500, 4, rng(1))
    assert np.all(net.degrees == 4)
    assert_simple_symmetric(net)


def test_random_regular_k4_is_complete():
    net = build_random_regular(4, 3, rng())
    assert net.n_edges == 6


def test_random_regular_seed_sensitivity():
    a = build_random_regular(2500, 4, rng(1))
    b = build_random_regular(2500, 4, rng(2))
    assert not np.array_equal(a.edges(), b.edges())
    assert np.array_equal(a.degrees, b.degrees)


def test_random_regular_bad_args():
    with pytest.raises(ValueError):
        build_random_regular(5, 3, rng())
    with pytest.raises(ValueError):
        build_random_regular(4, 4, rng())


def test_random_regular_retry_budget():
    # n=6, k=4 has simple realisations but budget 1 with an unlucky stream can fail;
    # budget 0 always fails
    with pytest.raises(RuntimeError):
        build_random_regular(6, 4, rng(), max_tries=0)


def test_well_mixed():
    assert build_well_mixed(2).n_edges == 1
    assert build_well_mixed(100).n_edges == 4950
    assert np.all(build_well_mixed(2500).degrees == 2499)
    with pytest.raises(ValueError):
        build_well_mixed(1)


def test_scale_free_seed_only():
    net = build_scale_free(3, 2, rng())
    assert net.n_edges == 3
    assert np.all(net.degrees == 2)


def test_scale_free_mean_and_max_degree():
    n, m = 2500, 2
    edges_expected = (m + 1) * m // 2 + m * (n - m - 1)
    for seed in range(3):
        net = build_scale_free(n, m, rng(seed))
        assert net.n_edges == edges_expected
        assert abs(net.degrees.mean() - 2 * m) / (2 * m) < 0.05
        assert net.degrees.max() > 50
        assert net.degrees.var() > 0


def test_scale_free_bad_args():
    with pytest.raises(ValueError):
        build_scale_free(2, 2, rng())


GENERATORS = {
    "lattice": lambda seed: build_lattice(7),
    "small_world": lambda seed: build_small_world(60, 4, 0.3, rng(seed)),
    "random_regular": lambda seed: build_random_regular(60, 4, rng(seed)),
    "well_mixed": lambda seed: build_well_mixed(20),
    "scale_free": lambda seed: build_scale_free(60, 2, rng(seed)),
}


@pytest.mark.parametrize("kind", sorted(GENERATORS))
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_generators_simple_and_reproducible(kind, seed):
    a = GENERATORS[kind](seed)
    b = GENERATORS[kind](seed)
    assert_simple_symmetric(a)
    assert np.array_equal(a.edges(), b.edges())
    assert a.topology == kind
    if kind in ("lattice", "random_regular", "well_mixed"):
        assert a.degrees.var() == 0
    if kind == "small_world":
        assert a.n_edges == 60 * 2
    if kind == "scale_free":
        assert a.degrees.var() > 0


def test_from_edges_rejects_bad_input():
    with pytest.raises(ValueError):
        from_edges(3, [(0, 0)], "custom")
    with pytest.raises(ValueError):
        from_edges(3, [(0, 1), (1, 0)], "custom")
    with pytest.raises(ValueError):
        from_edges(3, [(0, 3)], "custom")


def test_edgelist_roundtrip(tmp_path):
    net = build_scale_free(50, 2, rng(4))
    path = tmp_path / "edges.txt"
    net.write_edgelist(path)
    lines = path.read_text().splitlines()
    assert len(lines) == net.n_edges
    u, v = map(int, lines[0].split())
    assert u < v
    back = load_edgelist(path, n=50)
    assert np.array_equal(back.edges(), net.edges())


def test_build_dispatch():
    assert build("lattice", L=5).n == 25
    assert build("lattice", n=36).side == 6
    assert build("well_mixed", n=5).n_edges == 10
    with pytest.raises(ValueError):
        build("torus", n=5)
    with pytest.raises(ValueError):
        build("lattice", n=10)
