import numpy as np
import pytest

from fmmlayout.graph import Component, component_from_edges
from fmmlayout.shortest_paths import (
    floyd_warshall,
    johnson,
    prefer_johnson,
    shortest_path_matrix,
)
from oracles import dijkstra_matrix, random_connected_component


def test_path_distance():
    c = component_from_edges(3, [[0, 1], [1, 2]])
    for fn in (floyd_warshall, johnson):
        d = fn(c)
        assert d[0, 2] == 2.0
        assert d[2, 0] == 2.0


def test_single_node():
    c = component_from_edges(1, [])
    assert floyd_warshall(c).tolist() == [[0.0]]
    assert johnson(c).tolist() == [[0.0]]


def test_star_leaf_distances():
    c = component_from_edges(5, [[0, i] for i in range(1, 5)])
    d = johnson(c)
    for i in range(1, 5):
        for j in range(1, 5):
            assert d[i, j] == (0.0 if i == j else 2.0)


def test_matches_dijkstra_oracle(rng):
    c_edges, w = random_connected_component(rng, 50, extra_edges=30, weighted=True)
    c = Component(np.arange(50), c_edges, w)
    expected = dijkstra_matrix(50, c_edges, w)
    assert np.allclose(floyd_warshall(c), expected, atol=1e-12)
    assert np.allclose(johnson(c), expected, atol=1e-12)


def test_disconnected_names_pair():
    c = component_from_edges(4, [[0, 1], [2, 3]])
    with pytest.raises(ValueError, match="not connected"):
        floyd_warshall(c)
    with pytest.raises(ValueError, match="not connected"):
        johnson(c)


def test_algorithms_agree_on_random_sparse(rng):
    for _ in range(20):
        n = int(rng.integers(2, 60))
        edges, w = random_connected_component(
            rng, n, extra_edges=int(rng.integers(0, n)), weighted=bool(rng.integers(2))
        )
        c = Component(np.arange(n), edges, w)
        d1 = floyd_warshall(c)
        d2 = johnson(c)
        assert np.max(np.abs(d1 - d2)) <= 1e-12


def test_unit_weight_entries_are_integers(rng):
    edges, w = random_connected_component(rng, 40, extra_edges=15)
    c = Component(np.arange(40), edges, w)
    d = shortest_path_matrix(c)
    assert np.array_equal(d, np.round(d))
    assert d.min() == 0.0


def test_matrix_invariants(rng):
    edges, w = random_connected_component(rng, 30, extra_edges=10, weighted=True)
    c = Component(np.arange(30), edges, w)
    d = johnson(c)
    assert np.allclose(d, d.T)
    assert np.all(np.diag(d) == 0)
    assert np.isfinite(d).all()
    # triangle inequality
    for k in range(30):
        assert np.all(d <= d[:, k : k + 1] + d[k : k + 1, :] + 1e-9)


def test_node_cap_refused():
    c = component_from_edges(5, [[i, i + 1] for i in range(4)])
    with pytest.raises(ValueError, match="cap"):
        floyd_warshall(c, node_cap=4)
    with pytest.raises(ValueError, match="cap"):
        johnson(c, node_cap=4)


def test_algorithm_selection_rule():
    # sparse: m below n^2/log n
    assert prefer_johnson(1000, 999)
    # dense: m at n^2/2 exceeds the crossover for n = 1000
    assert not prefer_johnson(1000, 500_000)
    # tiny components default to the dense path
    assert not prefer_johnson(1, 0)
    assert not prefer_johnson(2, 1)


def test_zero_weight_rejected():
    bad = Component(np.arange(2), np.array([[0, 1]]), np.array([0.0]))
    with pytest.raises(ValueError):
        floyd_warshall(bad)
    with pytest.raises(ValueError):
        johnson(bad)
