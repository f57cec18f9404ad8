"""All-pairs shortest path distances for one connected component.

Two interchangeable algorithms: the cubic dense relaxation and the
per-source Dijkstra sweep (the reweighting step of the latter is a no-op
here because weights are validated positive, so only the Dijkstra core
remains).  `shortest_path_matrix` picks between them by the usual
complexity crossover.  Distance matrices are dense, so components above
``node_cap`` are refused outright.
"""

import math

import numpy as np

from ._kernels import active
from .graph import Component

DEFAULT_NODE_CAP = 20_000


def _validate(c: Component, node_cap: int):
    n = c.n_nodes
    if n == 0:
        raise ValueError("component has no nodes")
    if n > node_cap:
        raise ValueError(
            f"component with {n} nodes exceeds the dense distance cap {node_cap}"
        )
    if np.any(c.weights <= 0):
        raise ValueError("edge weights must be positive")


def _check_connected(c: Component, d: np.ndarray):
    bad = np.argwhere(np.isinf(d))
    if bad.size:
        i, j = bad[0]
        pi, pj = c.node_indices[i], c.node_indices[j]
        raise ValueError(
            f"component is not connected: no path between nodes {pi} and {pj}"
        )


def floyd_warshall(c: Component, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """Exact distance matrix by all-intermediate relaxation; O(n^3)."""
    _validate(c, node_cap)
    n = c.n_nodes
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for e in range(c.n_edges):
        u, v = c.edges[e]
        w = c.weights[e]
        if w < d[u, v]:
            d[u, v] = w
            d[v, u] = w
    active.floyd_warshall_inplace(d)
    _check_connected(c, d)
    return d


def _csr_adjacency(c: Component):
    n = c.n_nodes
    deg = np.zeros(n, np.int64)
    if c.n_edges:
        np.add.at(deg, c.edges[:, 0], 1)
        np.add.at(deg, c.edges[:, 1], 1)
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(indptr[-1], np.int64)
    weights = np.empty(indptr[-1], np.float64)
    fill = indptr[:-1].copy()
    for e in range(c.n_edges):
        u, v = c.edges[e]
        w = c.weights[e]
        indices[fill[u]] = v
        weights[fill[u]] = w
        fill[u] += 1
        indices[fill[v]] = u
        weights[fill[v]] = w
        fill[v] += 1
    return indptr, indices, weights


def johnson(c: Component, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """Distance matrix by Dijkstra from every source; O(n^2 log n + mn)."""
    _validate(c, node_cap)
    n = c.n_nodes
    indptr, indices, weights = _csr_adjacency(c)
    d = np.empty((n, n))
    active.dijkstra_all_sources(indptr, indices, weights, d)
    _check_connected(c, d)
    return d


def prefer_johnson(n_nodes: int, n_edges: int) -> bool:
    """Dijkstra sweep wins while m < n^2 / log n (natural log)."""
    if n_nodes <= 2:
        return False
    return n_edges < n_nodes * n_nodes / math.log(n_nodes)


def shortest_path_matrix(c: Component, node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    if prefer_johnson(c.n_nodes, c.n_edges):
        return johnson(c, node_cap)
    return floyd_warshall(c, node_cap)
