"""Stress layout for small components.

Minimizes  sum_{i<j} (1/d_ij^2) (|p_i - p_j| - l*d_ij)^2  by repeatedly
applying 2D Newton steps to the node with the largest gradient, with a
damped-gradient safeguard so the energy never increases.  Also contains
the two optional coarsening passes (leaf peeling and degree-2 chain
removal) with their exact inverse placement rules.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ._kernels import active
from .graph import Component


@dataclass(frozen=True)
class KKParams:
    l: float = 1.0  # desired unit edge length
    max_outer_iterations: int | None = None  # default 100 * n
    node_tolerance: float = 1e-3  # stop when every gradient norm is below
    newton_max_steps: int = 20  # per selected node

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError("l must be positive")
        if not self.node_tolerance > 0:
            raise ValueError("node_tolerance must be positive")
        if self.newton_max_steps < 1:
            raise ValueError("newton_max_steps must be >= 1")
        if self.max_outer_iterations is not None and self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1")


# --------------------------------------------------------------------------
# energy and derivatives
# --------------------------------------------------------------------------


def kk_energy(positions: np.ndarray, dist: np.ndarray, l: float = 1.0) -> float:
    """Stress energy of a layout against target distances l*d_ij."""
    pos = np.asarray(positions, dtype=np.float64)
    n = dist.shape[0]
    if pos.shape != (n, 2):
        raise ValueError(
            f"layout shape {pos.shape} does not match distance matrix size {n}"
        )
    if n < 2:
        return 0.0
    iu = np.triu_indices(n, k=1)
    diff = pos[iu[0]] - pos[iu[1]]
    r = np.hypot(diff[:, 0], diff[:, 1])
    d = dist[iu]
    return float(np.sum((r - l * d) ** 2 / (d * d)))


def kk_node_gradient(positions, dist, l: float, m: int) -> np.ndarray:
    """Analytic gradient of the energy w.r.t. node m."""
    pos = np.asarray(positions, dtype=np.float64)
    n = dist.shape[0]
    idx = np.arange(n) != m
    diff = pos[m] - pos[idx]
    r = np.maximum(np.hypot(diff[:, 0], diff[:, 1]), 1e-300)
    d = dist[m, idx]
    c = 2.0 * (1.0 - l * d / r) / (d * d)
    return (c[:, None] * diff).sum(axis=0)


def kk_node_hessian(positions, dist, l: float, m: int) -> np.ndarray:
    """Analytic 2x2 Hessian of the energy w.r.t. node m."""
    pos = np.asarray(positions, dtype=np.float64)
    n = dist.shape[0]
    idx = np.arange(n) != m
    diff = pos[m] - pos[idx]
    r2 = diff[:, 0] ** 2 + diff[:, 1] ** 2
    r = np.maximum(np.sqrt(r2), 1e-300)
    r3 = r * r * r
    d = dist[m, idx]
    k = 2.0 / (d * d)
    t = l * d
    hxx = np.sum(k * (1.0 - t * diff[:, 1] ** 2 / r3))
    hyy = np.sum(k * (1.0 - t * diff[:, 0] ** 2 / r3))
    hxy = np.sum(k * t * diff[:, 0] * diff[:, 1] / r3)
    return np.array([[hxx, hxy], [hxy, hyy]])


# --------------------------------------------------------------------------
# layout
# --------------------------------------------------------------------------


def initial_circle_positions(n: int, l: float, seed: int) -> np.ndarray:
    """Deterministic start: nodes on a circle of radius l*n/(2*pi) in a
    seeded random angular order."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    angles = np.empty(n)
    angles[order] = 2.0 * np.pi * np.arange(n) / n
    radius = l * n / (2.0 * np.pi)
    return np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1)


def kk_layout(
    c: Component,
    dist: np.ndarray,
    params: KKParams | None = None,
    seed: int = 0,
    init: np.ndarray | None = None,
) -> np.ndarray:
    """Minimize the stress energy; deterministic for a fixed seed.

    Starts from the seeded circle layout unless ``init`` supplies an
    explicit starting layout.  The final energy never exceeds the
    initial energy (uphill Newton steps are replaced by damped gradient
    steps).
    """
    params = params or KKParams()
    n = c.n_nodes
    if n == 0:
        raise ValueError("cannot lay out an empty component")
    if dist.shape != (n, n):
        raise ValueError("distance matrix does not match component size")
    if n == 1:
        return np.zeros((1, 2))
    pos = initial_circle_positions(n, params.l, seed) if init is None else init.copy()
    max_outer = params.max_outer_iterations or 100 * n
    active.kk_minimize(
        pos,
        np.ascontiguousarray(dist, dtype=np.float64),
        params.l,
        params.node_tolerance,
        max_outer,
        params.newton_max_steps,
    )
    return pos


# --------------------------------------------------------------------------
# coarsening
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeOneEvent:
    node: int  # removed (original-local index)
    neighbor: int
    edge_length: float


@dataclass(frozen=True)
class DegreeTwoEvent:
    node: int  # removed (original-local index)
    left: int
    right: int
    new_edge: int  # index of the replacement edge in the coarse component
    edge_length: float  # weight of the replacement edge


@dataclass
class CoarseningRecord:
    """Ordered removal log; replaying it in reverse restores the node set."""

    events: list[Union[DegreeOneEvent, DegreeTwoEvent]]
    kept: np.ndarray  # original-local indices surviving, in coarse order
    n_original: int


def _adjacency(c: Component) -> dict[int, dict[int, float]]:
    adj: dict[int, dict[int, float]] = {i: {} for i in range(c.n_nodes)}
    for e in range(c.n_edges):
        u, v = int(c.edges[e, 0]), int(c.edges[e, 1])
        adj[u][v] = float(c.weights[e])
        adj[v][u] = float(c.weights[e])
    return adj


def _rebuild(c: Component, adj, removed, events) -> tuple[Component, CoarseningRecord]:
    kept = np.array([i for i in range(c.n_nodes) if i not in removed], dtype=np.int64)
    local = {int(p): k for k, p in enumerate(kept)}
    seen = set()
    edges = []
    weights = []
    edge_index: dict[tuple[int, int], int] = {}
    for u in kept:
        for v, w in adj[int(u)].items():
            key = (int(u), v) if int(u) < v else (v, int(u))
            if key in seen:
                continue
            seen.add(key)
            edge_index[key] = len(edges)
            edges.append((local[key[0]], local[key[1]]))
            weights.append(w)
    coarse = Component(
        c.node_indices[kept],
        np.array(edges, dtype=np.int64).reshape(-1, 2),
        np.array(weights, dtype=np.float64),
    )
    # resolve replacement edge ids now that the coarse edge list exists
    resolved = []
    for ev in events:
        if isinstance(ev, DegreeTwoEvent) and ev.new_edge < 0:
            key = (ev.left, ev.right) if ev.left < ev.right else (ev.right, ev.left)
            resolved.append(
                DegreeTwoEvent(ev.node, ev.left, ev.right, edge_index.get(key, -1), ev.edge_length)
            )
        else:
            resolved.append(ev)
    return coarse, CoarseningRecord(resolved, kept, c.n_nodes)


def contract_degree_one(c: Component) -> tuple[Component, CoarseningRecord]:
    """Peel degree-1 nodes (recording node, neighbor, edge length) until
    none remain or only two nodes are left."""
    adj = _adjacency(c)
    removed: set[int] = set()
    events: list[DegreeOneEvent] = []
    n_left = c.n_nodes
    queue = sorted(i for i in adj if len(adj[i]) == 1)
    while queue and n_left > 2:
        u = queue.pop(0)
        if u in removed or len(adj[u]) != 1:
            continue
        (v, w), = adj[u].items()
        events.append(DegreeOneEvent(u, v, w))
        removed.add(u)
        n_left -= 1
        del adj[v][u]
        adj[u].clear()
        if len(adj[v]) == 1 and v not in removed:
            queue.append(v)
    return _rebuild(c, adj, removed, events)


def contract_degree_two(c: Component) -> tuple[Component, CoarseningRecord]:
    """Replace degree-2 nodes (distinct, non-adjacent neighbors) by a
    single edge whose weight is the sum of the removed pair."""
    adj = _adjacency(c)
    removed: set[int] = set()
    events: list[DegreeTwoEvent] = []
    queue = sorted(i for i in adj if len(adj[i]) == 2)
    while queue:
        u = queue.pop(0)
        if u in removed or len(adj[u]) != 2:
            continue
        (a, wa), (b, wb) = adj[u].items()
        if a == b or b in adj[a]:
            continue  # parallel edge would appear; leave the node alone
        events.append(DegreeTwoEvent(u, a, b, -1, wa + wb))
        removed.add(u)
        del adj[a][u]
        del adj[b][u]
        adj[u].clear()
        adj[a][b] = wa + wb
        adj[b][a] = wa + wb
        for x in (a, b):
            if len(adj[x]) == 2 and x not in removed:
                queue.append(x)
    return _rebuild(c, adj, removed, events)


def restore_degree_one(
    positions: np.ndarray, rec: CoarseningRecord, l: float = 1.0, seed: int = 0
) -> np.ndarray:
    """Replay leaf peels in reverse: each node goes at its neighbor's
    position plus l*edge_length along the ray from the current layout's
    centroid through the neighbor (seeded random direction if the
    neighbor sits on the centroid)."""
    rng = np.random.default_rng(seed)
    full = np.zeros((rec.n_original, 2))
    placed = np.zeros(rec.n_original, bool)
    full[rec.kept] = positions
    placed[rec.kept] = True
    for ev in reversed(rec.events):
        centroid = full[placed].mean(axis=0)
        nb = full[ev.neighbor]
        u = nb - centroid
        norm = float(np.hypot(u[0], u[1]))
        if norm < 1e-12 * (1.0 + float(np.abs(nb).max())):
            theta = rng.uniform(0.0, 2.0 * np.pi)
            u = np.array([np.cos(theta), np.sin(theta)])
        else:
            u = u / norm
        full[ev.node] = nb + l * ev.edge_length * u
        placed[ev.node] = True
    return full


def restore_degree_two(positions: np.ndarray, rec: CoarseningRecord) -> np.ndarray:
    """Replay chain removals in reverse: each node returns at the midpoint
    of its two neighbors."""
    full = np.zeros((rec.n_original, 2))
    placed = np.zeros(rec.n_original, bool)
    full[rec.kept] = positions
    placed[rec.kept] = True
    for ev in reversed(rec.events):
        full[ev.node] = 0.5 * (full[ev.left] + full[ev.right])
        placed[ev.node] = True
    return full
