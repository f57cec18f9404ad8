"""Independent reference implementations used only by the tests.

Deliberately written with different data structures and algorithms than
the package (dict adjacency + heapq Dijkstra, union-find components,
exhaustive diameters, direct force sums) so the two sides cannot share a
bug.
"""

import heapq

import numpy as np


def dijkstra_matrix(n, edges, weights):
    """All-pairs distances by per-source heapq Dijkstra on dict adjacency."""
    adj = {i: [] for i in range(n)}
    for (u, v), w in zip(edges, weights):
        adj[int(u)].append((int(v), float(w)))
        adj[int(v)].append((int(u), float(w)))
    out = np.full((n, n), np.inf)
    for s in range(n):
        dist = {s: 0.0}
        heap = [(0.0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist.get(u, np.inf):
                continue
            for v, w in adj[u]:
                alt = d + w
                if alt < dist.get(v, np.inf):
                    dist[v] = alt
                    heapq.heappush(heap, (alt, v))
        for v, d in dist.items():
            out[s, v] = d
    return out


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def groups(self):
        out = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return list(out.values())


def exact_diameter(points):
    """Max pairwise distance by the O(n^2) scan."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        return 0.0
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2.max()))


def direct_repulsion(points, k_r=1.0):
    """Plain python double loop force sum (skips coincident pairs)."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    out = np.zeros_like(pts)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = pts[i] - pts[j]
            r2 = d @ d
            if r2 > 0:
                out[i] += k_r * d / r2
    return out


def random_connected_component(rng, n, extra_edges=0, weighted=False):
    """Random tree plus optional extra edges; returns (edges, weights)."""
    edges = [(i, int(rng.integers(0, i))) for i in range(1, n)]
    for _ in range(extra_edges):
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        if a != b and (min(a, b), max(a, b)) not in {(min(u, v), max(u, v)) for u, v in edges}:
            edges.append((a, b))
    if weighted:
        weights = rng.uniform(0.1, 5.0, len(edges))
    else:
        weights = np.ones(len(edges))
    return np.array(edges, dtype=np.int64), np.asarray(weights, dtype=float)
