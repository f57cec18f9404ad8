import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fmmlayout.graph import Component, component_from_edges
from fmmlayout.kamada_kawai import (
    KKParams,
    contract_degree_one,
    contract_degree_two,
    initial_circle_positions,
    kk_energy,
    kk_layout,
    kk_node_gradient,
    kk_node_hessian,
    restore_degree_one,
    restore_degree_two,
)
from fmmlayout.shortest_paths import floyd_warshall
from oracles import random_connected_component


def _component(rng, n, extra=0, weighted=False):
    edges, w = random_connected_component(rng, n, extra_edges=extra, weighted=weighted)
    return Component(np.arange(n), edges, w)


class TestEnergy:
    def test_two_nodes_at_target(self):
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        pos = np.array([[0.0, 0.0], [1.0, 0.0]])
        assert kk_energy(pos, d, 1.0) == 0.0

    def test_two_nodes_stretched(self):
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        pos = np.array([[0.0, 0.0], [2.0, 0.0]])
        assert kk_energy(pos, d, 1.0) == pytest.approx(1.0)

    def test_collinear_path_of_three(self):
        c = component_from_edges(3, [[0, 1], [1, 2]])
        d = floyd_warshall(c)
        pos = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
        assert kk_energy(pos, d, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="match"):
            kk_energy(np.zeros((3, 2)), np.zeros((2, 2)), 1.0)

    def test_rigid_motion_invariance(self, rng):
        c = _component(rng, 12, extra=6)
        d = floyd_warshall(c)
        pos = rng.normal(0, 3, (12, 2))
        e0 = kk_energy(pos, d, 1.0)
        theta = rng.uniform(0, 2 * np.pi)
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        moved = pos @ rot.T + rng.normal(0, 10, 2)
        e1 = kk_energy(moved, d, 1.0)
        assert abs(e1 - e0) <= 1e-9 * max(e0, 1.0)


class TestDerivatives:
    def test_gradient_and_hessian_match_finite_differences(self, rng):
        h = 1e-6
        for _ in range(10):
            n = 10
            c = _component(rng, n, extra=5, weighted=True)
            d = floyd_warshall(c)
            pos = rng.normal(0, 2, (n, 2))
            m = int(rng.integers(n))
            g = kk_node_gradient(pos, d, 1.0, m)
            gfd = np.zeros(2)
            for a in range(2):
                pp = pos.copy()
                pp[m, a] += h
                ep = kk_energy(pp, d, 1.0)
                pp[m, a] -= 2 * h
                em = kk_energy(pp, d, 1.0)
                gfd[a] = (ep - em) / (2 * h)
            assert np.abs(g - gfd).max() <= 1e-5 * max(np.abs(gfd).max(), 1e-9)
            hess = kk_node_hessian(pos, d, 1.0, m)
            hfd = np.zeros((2, 2))
            for a in range(2):
                pp = pos.copy()
                pp[m, a] += h
                gp = kk_node_gradient(pp, d, 1.0, m)
                pp[m, a] -= 2 * h
                gm = kk_node_gradient(pp, d, 1.0, m)
                hfd[:, a] = (gp - gm) / (2 * h)
            assert np.abs(hess - hfd).max() <= 1e-5 * max(np.abs(hfd).max(), 1e-9)


class TestLayout:
    def test_single_node_at_origin(self):
        c = component_from_edges(1, [])
        pos = kk_layout(c, np.zeros((1, 1)))
        assert pos.tolist() == [[0.0, 0.0]]

    def test_empty_rejected(self):
        c = component_from_edges(0, [])
        with pytest.raises(ValueError):
            kk_layout(c, np.zeros((0, 0)))

    def test_triangle_reaches_zero_energy(self):
        c = component_from_edges(3, [[0, 1], [1, 2], [2, 0]])
        d = floyd_warshall(c)
        pos = kk_layout(c, d, seed=3)
        assert kk_energy(pos, d, 1.0) < 1e-6

    def test_four_cycle_positive_energy_and_monotone(self):
        c = component_from_edges(4, [[0, 1], [1, 2], [2, 3], [3, 0]])
        d = floyd_warshall(c)
        init = initial_circle_positions(4, 1.0, seed=5)
        pos = kk_layout(c, d, seed=5)
        e_init = kk_energy(init, d, 1.0)
        e_final = kk_energy(pos, d, 1.0)
        assert e_final > 0.0  # the diagonal target 2*l is unreachable
        assert e_final <= e_init

    def test_energy_never_increases(self, rng):
        for seed in range(5):
            n = int(rng.integers(5, 40))
            c = _component(rng, n, extra=int(rng.integers(0, n)))
            d = floyd_warshall(c)
            init = initial_circle_positions(n, 1.0, seed=seed)
            pos = kk_layout(c, d, seed=seed)
            assert kk_energy(pos, d, 1.0) <= kk_energy(init, d, 1.0) + 1e-12

    def test_deterministic(self, rng):
        c = _component(rng, 20, extra=8)
        d = floyd_warshall(c)
        a = kk_layout(c, d, seed=11)
        b = kk_layout(c, d, seed=11)
        assert np.array_equal(a, b)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            KKParams(l=0.0)
        with pytest.raises(ValueError):
            KKParams(node_tolerance=-1)


def _tree(rng, n):
    edges = np.array([(i, int(rng.integers(0, i))) for i in range(1, n)])
    return Component(np.arange(n), edges, np.ones(len(edges)))


class TestDegreeOneCoarsening:
    def test_star_stops_at_two_nodes(self):
        c = component_from_edges(4, [[0, 1], [0, 2], [0, 3]])
        coarse, rec = contract_degree_one(c)
        assert coarse.n_nodes == 2
        assert len(rec.events) == 2

    def test_triangle_unchanged(self):
        c = component_from_edges(3, [[0, 1], [1, 2], [2, 0]])
        coarse, rec = contract_degree_one(c)
        assert coarse.n_nodes == 3
        assert rec.events == []

    def test_random_tree_collapses_fully(self, rng):
        c = _tree(rng, 50)
        coarse, rec = contract_degree_one(c)
        assert coarse.n_nodes == 2
        assert len(rec.events) == 48

    def test_restore_along_centroid_ray(self):
        c = component_from_edges(3, [[0, 1], [1, 2]])
        coarse, rec = contract_degree_one(c)
        # coarse has 2 nodes; place them so the centroid is at the origin
        # and the removed node's neighbor sits at (1, 0)
        ev = rec.events[-1]
        coarse_pos = np.zeros((2, 2))
        nb_coarse_index = int(np.where(rec.kept == ev.neighbor)[0][0])
        coarse_pos[nb_coarse_index] = (1.0, 0.0)
        coarse_pos[1 - nb_coarse_index] = (-1.0, 0.0)
        restored = restore_degree_one(coarse_pos, rec)
        assert restored[ev.node] == pytest.approx([2.0, 0.0])

    def test_restore_degenerate_direction_is_unit(self):
        coarse, rec = contract_degree_one(component_from_edges(3, [[0, 1], [1, 2]]))
        ev = rec.events[0]
        # put every kept node on the centroid so the ray is undefined
        coarse_pos = np.zeros((2, 2))
        restored = restore_degree_one(coarse_pos, rec, seed=9)
        d = np.hypot(*(restored[ev.node] - restored[ev.neighbor]))
        assert d == pytest.approx(ev.edge_length, abs=1e-12)

    def test_peel_restore_round_trip(self, rng):
        c = component_from_edges(10, [[i, i + 1] for i in range(9)])
        coarse, rec = contract_degree_one(c)
        pos = rng.normal(0, 1, (coarse.n_nodes, 2))
        restored = restore_degree_one(pos, rec)
        assert restored.shape == (10, 2)
        assert np.isfinite(restored).all()
        # every restored node sits exactly edge_length from its neighbor
        for ev in rec.events:
            d = np.hypot(*(restored[ev.node] - restored[ev.neighbor]))
            assert d == pytest.approx(ev.edge_length, abs=1e-12)


class TestDegreeTwoCoarsening:
    def test_path_collapses_to_edge(self):
        c = component_from_edges(3, [[0, 1], [1, 2]])
        coarse, rec = contract_degree_two(c)
        assert coarse.n_nodes == 2
        assert coarse.weights.tolist() == [2.0]
        assert len(rec.events) == 1
        ev = rec.events[0]
        assert ev.edge_length == 2.0
        assert coarse.weights[ev.new_edge] == 2.0

    def test_triangle_guard(self):
        c = component_from_edges(3, [[0, 1], [1, 2], [2, 0]])
        coarse, rec = contract_degree_two(c)
        assert coarse.n_nodes == 3
        assert rec.events == []

    def test_c100_reduces_to_minimal_cycle(self):
        c = component_from_edges(100, [[i, (i + 1) % 100] for i in range(100)])
        coarse, rec = contract_degree_two(c)
        assert coarse.n_nodes == 3
        assert coarse.weights.sum() == pytest.approx(100.0)

    def test_restore_midpoint(self):
        c = component_from_edges(3, [[0, 1], [1, 2]])
        coarse, rec = contract_degree_two(c)
        pos = np.array([[0.0, 0.0], [2.0, 0.0]])
        restored = restore_degree_two(pos, rec)
        assert restored[rec.events[0].node] == pytest.approx([1.0, 0.0])

    def test_nested_midpoints_on_path_of_five(self):
        c = component_from_edges(5, [[i, i + 1] for i in range(4)])
        coarse, rec = contract_degree_two(c)
        assert coarse.n_nodes == 2
        pos = np.array([[0.0, 0.0], [4.0, 0.0]])
        restored = restore_degree_two(pos, rec)
        assert np.isfinite(restored).all()
        for ev in rec.events:
            assert restored[ev.node] == pytest.approx(
                0.5 * (restored[ev.left] + restored[ev.right])
            )

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_series_parallel_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        # grow a series-parallel-ish graph by repeatedly subdividing or
        # duplicating edges of a seed cycle
        edges = {(0, 1), (1, 2), (2, 0)}
        n = 3
        for _ in range(int(rng.integers(0, 15))):
            u, v = list(edges)[int(rng.integers(len(edges)))]
            if rng.random() < 0.7:  # series: subdivide
                edges.remove((u, v))
                edges.add((u, n))
                edges.add((n, v))
                n += 1
            else:  # parallel-ish: attach a two-edge detour
                edges.add((u, n))
                edges.add((n, v))
                n += 1
        c = component_from_edges(n, sorted(edges))
        coarse, rec = contract_degree_two(c)
        pos = rng.normal(0, 1, (coarse.n_nodes, 2))
        restored = restore_degree_two(pos, rec)
        assert restored.shape == (n, 2)
        assert np.isfinite(restored).all()
        assert coarse.n_nodes + len(rec.events) == n
