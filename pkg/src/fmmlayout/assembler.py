"""Whole-graph layout: split, lay out per component, assemble.

Small components get the stress layout (optionally after coarsening),
large ones the force simulation.  Component layouts are rescaled to a
common density, then arranged by laying out a meta tree whose nodes are
components and whose edge lengths are (diam_a + diam_b)/2 + spacing.
Oversized meta trees are split into subtrees, laid out piecewise and
assembled recursively the same way.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .forceatlas2 import Fa2Params, fa2_layout
from .fmm import FmmParams
from .graph import Component, Graph, connected_components
from .kamada_kawai import (
    KKParams,
    contract_degree_one,
    contract_degree_two,
    kk_layout,
    restore_degree_one,
    restore_degree_two,
)
from .shortest_paths import shortest_path_matrix


@dataclass(frozen=True)
class AssemblyParams:
    kk_threshold: int = 300  # below: stress layout; at/above: force simulation
    target_density: float = 1.0  # nodes per unit bounding-box area
    spacing: float | None = None  # meta edge slack; default 2*l
    meta_threshold: int = 1000  # largest meta graph laid out directly
    seed: int = 0
    l: float = 1.0  # unit edge length shared by the stages
    coarsen: bool = False
    max_box_overlap: float | None = 0.25  # separation pass threshold; None: off

    def __post_init__(self):
        if self.kk_threshold < 1:
            raise ValueError("kk_threshold must be >= 1")
        if not self.target_density > 0:
            raise ValueError("target_density must be positive")
        if self.meta_threshold < 2:
            raise ValueError("meta_threshold must be >= 2")
        if not self.l > 0:
            raise ValueError("l must be positive")
        if self.spacing is not None and self.spacing < 0:
            raise ValueError("spacing must be >= 0")
        if self.max_box_overlap is not None and not 0 < self.max_box_overlap:
            raise ValueError("max_box_overlap must be positive or None")

    @property
    def spacing_value(self) -> float:
        return 2.0 * self.l if self.spacing is None else self.spacing


@dataclass(frozen=True)
class LayoutParams:
    """Every tunable of the pipeline in one place."""

    assembly: AssemblyParams = field(default_factory=AssemblyParams)
    kk: KKParams = field(default_factory=KKParams)
    fa2: Fa2Params | None = None  # None: scale-aware profile, see default_fa2_params
    fmm: FmmParams = field(default_factory=FmmParams)
    threads: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def resolved_fa2(self) -> Fa2Params:
        return self.fa2 if self.fa2 is not None else default_fa2_params()


def default_fa2_params(base: Fa2Params | None = None) -> Fa2Params:
    """Convergent profile for the pipeline's force simulation.

    Initializing at the gravity/repulsion equilibrium scale
    (side ~ 2*sqrt(n*k_r/k_g)) and bounding the step at 0.1 keeps the
    explicit update stable, which the bare defaults do not guarantee.
    """
    base = base or Fa2Params(step_max=0.1)
    return replace(base, scale=2.0 * math.sqrt(base.k_r / base.k_g))


@dataclass
class ComponentLayoutInfo:
    method: str  # point | pair | kk | fa2
    n_nodes: int
    seconds: float


@dataclass
class LayoutResult:
    positions: np.ndarray  # (n_nodes, 2) in graph node order
    components: list[ComponentLayoutInfo]
    timings: dict
    component_layouts: list = None  # standalone (pre-assembly) layouts
    meta_centers: np.ndarray = None  # one position per component


@dataclass(frozen=True)
class MetaGraph:
    """Spanning tree over component summaries."""

    ids: tuple  # payload identifiers, one per node
    diameters: np.ndarray
    sizes: np.ndarray
    edges: np.ndarray  # (k-1, 2) indices into ids
    weights: np.ndarray
    root: int  # first element of the linking permutation

    def __post_init__(self):
        k = len(self.ids)
        if self.edges.shape[0] != max(k - 1, 0):
            raise ValueError("meta graph must be a spanning tree")


def choose_layout_method(n_nodes: int, params: AssemblyParams) -> str:
    if n_nodes == 1:
        return "point"
    if n_nodes == 2:
        return "pair"
    return "kk" if n_nodes < params.kk_threshold else "fa2"


def derive_seed(base_seed: int, *path: int) -> int:
    """Stable per-stage RNG seed from the global seed and a stage path."""
    return int(np.random.SeedSequence((base_seed,) + path).generate_state(1)[0])


def _kk_with_optional_coarsening(c: Component, lp: LayoutParams, seed: int) -> np.ndarray:
    kkp = replace(lp.kk, l=lp.assembly.l)
    if not lp.assembly.coarsen or c.n_nodes <= 3:
        return kk_layout(c, shortest_path_matrix(c), kkp, seed)
    c1, rec1 = contract_degree_one(c)
    c2, rec2 = contract_degree_two(c1)
    pos = kk_layout(c2, shortest_path_matrix(c2), kkp, seed)
    pos = restore_degree_two(pos, rec2)
    pos = restore_degree_one(pos, rec1, l=kkp.l, seed=derive_seed(seed, 1))
    return pos


def layout_component(c: Component, lp: LayoutParams, seed: int = 0) -> np.ndarray:
    """Single-component layout using the method from choose_layout_method."""
    method = choose_layout_method(c.n_nodes, lp.assembly)
    if method == "point":
        return np.zeros((1, 2))
    if method == "pair":
        half = lp.assembly.l / 2.0
        return np.array([[-half, 0.0], [half, 0.0]])
    if method == "kk":
        return _kk_with_optional_coarsening(c, lp, seed)
    fa2p = replace(lp.resolved_fa2(), seed=seed, scale=lp.resolved_fa2().scale * lp.assembly.l)
    return fa2_layout(c, fa2p, lp.fmm)


def rescale_to_density(positions: np.ndarray, target_density: float, l: float = 1.0) -> np.ndarray:
    """Uniform scale about the centroid so nodes-per-bounding-box-area
    reaches the target (degenerate box sides are clamped to l)."""
    pos = np.asarray(positions, dtype=np.float64)
    n = pos.shape[0]
    if n == 0:
        return pos.copy()
    span = pos.max(axis=0) - pos.min(axis=0)
    area = max(span[0], l) * max(span[1], l)
    density = n / area
    s = math.sqrt(density / target_density)
    centroid = pos.mean(axis=0)
    return centroid + s * (pos - centroid)


def layout_density(positions: np.ndarray, l: float = 1.0) -> float:
    pos = np.asarray(positions, dtype=np.float64)
    span = pos.max(axis=0) - pos.min(axis=0)
    return pos.shape[0] / (max(span[0], l) * max(span[1], l))


def layout_diameter(positions: np.ndarray) -> float:
    """Bounding-box diagonal: an O(n) stand-in for the exact diameter
    (never smaller than it, at most sqrt(2) times larger)."""
    pos = np.asarray(positions, dtype=np.float64)
    if pos.shape[0] == 0:
        return 0.0
    span = pos.max(axis=0) - pos.min(axis=0)
    return float(math.hypot(span[0], span[1]))


def meta_tree_edges(sizes, permutation) -> list[tuple[int, int]]:
    """Linking rule: walk the permutation, joining each component to the
    largest already-placed one (ties: earliest in the permutation)."""
    edges = []
    best = permutation[0]
    for idx in range(1, len(permutation)):
        nxt = permutation[idx]
        edges.append((best, nxt))
        if sizes[nxt] > sizes[best]:
            best = nxt
    return edges


def build_meta_graph(summaries, spacing: float, seed: int = 0) -> MetaGraph:
    """``summaries``: sequence of (id, diameter, size) triples."""
    if len(summaries) == 0:
        raise ValueError("cannot build a meta graph over zero components")
    ids = tuple(s[0] for s in summaries)
    diams = np.array([s[1] for s in summaries], dtype=np.float64)
    sizes = np.array([s[2] for s in summaries], dtype=np.int64)
    rng = np.random.default_rng(seed)
    perm = [int(v) for v in rng.permutation(len(ids))]
    edges = np.array(meta_tree_edges(sizes, perm), dtype=np.int64).reshape(-1, 2)
    weights = (diams[edges[:, 0]] + diams[edges[:, 1]]) / 2.0 + spacing
    return MetaGraph(ids, diams, sizes, edges, weights, root=perm[0])


def _split_into_subtrees(mg: MetaGraph, limit: int) -> list[list[int]]:
    """Greedy post-order cut of the tree into connected parts of <= limit
    nodes."""
    k = len(mg.ids)
    adj: list[list[int]] = [[] for _ in range(k)]
    for a, b in mg.edges:
        adj[a].append(int(b))
        adj[b].append(int(a))
    parts: list[list[int]] = []
    pending: dict[int, list[list[int]]] = {}

    order = []
    parent = np.full(k, -1, np.int64)
    stack = [mg.root]
    seen = np.zeros(k, bool)
    seen[mg.root] = True
    while stack:
        u = stack.pop()
        order.append(u)
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                stack.append(v)
    for u in reversed(order):  # post-order: children first
        bucket = [u]
        for child_bucket in pending.pop(u, []):
            if len(bucket) + len(child_bucket) > limit:
                parts.append(child_bucket)  # finalize it as its own part
            else:
                bucket.extend(child_bucket)
        if len(bucket) >= limit or parent[u] < 0:
            parts.append(bucket)
        else:
            pending.setdefault(int(parent[u]), []).append(bucket)
    return parts


def _radial_tree_init(n: int, edges, weights) -> np.ndarray:
    """Dandelion start for tree stress layouts: every subtree gets an
    angular sector proportional to its node count, every child sits at
    its parent plus the edge weight along the sector bisector."""
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (a, b), w in zip(edges, weights):
        adj[int(a)].append((int(b), float(w)))
        adj[int(b)].append((int(a), float(w)))
    parent = np.full(n, -1, np.int64)
    order = [0]
    seen = np.zeros(n, bool)
    seen[0] = True
    for u in order:
        for v, _ in adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                order.append(v)
    sub = np.ones(n)
    for u in reversed(order):
        if parent[u] >= 0:
            sub[parent[u]] += sub[u]
    pos = np.zeros((n, 2))
    lo = np.zeros(n)
    hi = np.zeros(n)
    hi[0] = 2.0 * np.pi
    for u in order:
        a = lo[u]
        for v, w in adj[u]:
            if parent[v] != u:
                continue
            share = (hi[u] - lo[u]) * sub[v] / max(sub[u] - 1.0, 1.0)
            lo[v], hi[v] = a, a + share
            theta = 0.5 * (lo[v] + hi[v])
            pos[v] = pos[u] + w * np.array([np.cos(theta), np.sin(theta)])
            a += share
    return pos


def _kk_positions_for_tree(nodes, mg: MetaGraph, lp: LayoutParams, seed: int) -> np.ndarray:
    """Stress layout of a subtree of the meta graph, l = 1 so targets are
    the weighted tree distances.

    Solved in weight-normalized units (mean edge weight 1, gradients are
    otherwise far below the stop tolerance) from a radial tree start,
    then scaled back.
    """
    local = {g: i for i, g in enumerate(nodes)}
    edges = []
    weights = []
    for e in range(mg.edges.shape[0]):
        a, b = int(mg.edges[e, 0]), int(mg.edges[e, 1])
        if a in local and b in local:
            edges.append((local[a], local[b]))
            weights.append(float(mg.weights[e]))
    if len(nodes) == 1:
        return np.zeros((1, 2))
    wbar = float(np.mean(weights)) if weights else 1.0
    norm_w = np.array(weights, dtype=np.float64) / wbar
    comp = Component(
        np.asarray(nodes, dtype=np.int64),
        np.array(edges, dtype=np.int64).reshape(-1, 2),
        norm_w,
    )
    kkp = replace(lp.kk, l=1.0)
    init = _radial_tree_init(comp.n_nodes, comp.edges, norm_w)
    return wbar * kk_layout(comp, shortest_path_matrix(comp), kkp, seed, init=init)


def layout_meta(mg: MetaGraph, lp: LayoutParams, seed: int = 0) -> np.ndarray:
    """Positions for every meta node (component center)."""
    pos, _ = _layout_meta_recursive(mg, lp, seed, 0)
    return pos


def _layout_meta_recursive(mg: MetaGraph, lp: LayoutParams, seed: int, depth: int):
    k = len(mg.ids)
    if k == 1:
        return np.zeros((1, 2)), depth + 1
    if k <= lp.assembly.meta_threshold:
        return _kk_positions_for_tree(list(range(k)), mg, lp, seed), depth + 1
    parts = _split_into_subtrees(mg, lp.assembly.meta_threshold)
    part_pos = []
    summaries = []
    for i, nodes in enumerate(parts):
        p = _kk_positions_for_tree(nodes, mg, lp, derive_seed(seed, depth, i))
        p = p - p.mean(axis=0)
        part_pos.append(p)
        summaries.append(
            (i, layout_diameter(p), int(sum(mg.sizes[x] for x in nodes)))
        )
    sub = build_meta_graph(
        summaries, lp.assembly.spacing_value, derive_seed(seed, depth, len(parts))
    )
    centers, max_depth = _layout_meta_recursive(sub, lp, derive_seed(seed, depth + 1), depth + 1)
    out = np.zeros((k, 2))
    for i, nodes in enumerate(parts):
        out[nodes] = part_pos[i] + centers[i]
    return out, max_depth


def _violating_box_pairs(x0, x1, y0, y1, area, max_frac):
    """Sweep over x-sorted boxes; pairs whose intersection exceeds
    max_frac of the smaller box's area."""
    order = np.argsort(x0, kind="stable")
    active: list[int] = []
    pairs = []
    for idx in order:
        i = int(idx)
        active = [a for a in active if x1[a] > x0[i]]
        for a in active:
            oy = min(y1[a], y1[i]) - max(y0[a], y0[i])
            if oy <= 0.0:
                continue
            ox = min(x1[a], x1[i]) - x0[i]
            small = min(area[a], area[i])
            if ox * oy > max_frac * small:
                pairs.append((min(a, i), max(a, i)))
        active.append(i)
    pairs.sort()
    return pairs


def relieve_box_overlaps(centers, half_extents, masses, max_frac, l=1.0, sweeps=400):
    """Push component boxes apart until no pair overlaps by more than
    max_frac of the smaller box's area.

    Violating pairs separate along their minimum-penetration axis; the
    two centers split the shift inversely to their masses, so large
    components effectively stay put.  The safety margin grows with the
    sweep count so crowded neighborhoods cannot cycle forever.
    Deterministic (fixed pair order).
    """
    centers = np.array(centers, dtype=np.float64)
    hw = half_extents[:, 0]
    hh = half_extents[:, 1]
    area = 4.0 * hw * hh
    mass = np.asarray(masses, dtype=np.float64)
    for sweep in range(sweeps):
        x0 = centers[:, 0] - hw
        x1 = centers[:, 0] + hw
        y0 = centers[:, 1] - hh
        y1 = centers[:, 1] + hh
        pairs = _violating_box_pairs(x0, x1, y0, y1, area, max_frac)
        if not pairs:
            break
        pad_frac = 0.05 + 0.01 * sweep
        for i, j in pairs:
            ox = min(centers[i, 0] + hw[i], centers[j, 0] + hw[j]) - max(
                centers[i, 0] - hw[i], centers[j, 0] - hw[j]
            )
            oy = min(centers[i, 1] + hh[i], centers[j, 1] + hh[j]) - max(
                centers[i, 1] - hh[i], centers[j, 1] - hh[j]
            )
            if ox <= 0.0 or oy <= 0.0:
                continue
            if ox * oy <= max_frac * min(area[i], area[j]):
                continue
            axis, need = (0, ox) if ox <= oy else (1, oy)
            d = centers[j, axis] - centers[i, axis]
            sign = 1.0 if d >= 0 else -1.0
            pad = pad_frac * (l + min(hw[i] + hh[i], hw[j] + hh[j]))
            total = 1.1 * need + pad
            wi = mass[j] / (mass[i] + mass[j])
            centers[i, axis] -= sign * total * wi
            centers[j, axis] += sign * total * (1.0 - wi)
    return centers


def layout_graph(g: Graph, lp: LayoutParams | None = None) -> LayoutResult:
    """Full pipeline; deterministic for a fixed assembly seed."""
    lp = lp or LayoutParams()
    ap = lp.assembly
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    comps = connected_components(g)
    timings["components"] = time.perf_counter() - t0
    if not comps:
        return LayoutResult(np.zeros((0, 2)), [], timings)

    infos: list[ComponentLayoutInfo] = [None] * len(comps)
    layouts: list[np.ndarray] = [None] * len(comps)

    def one(i: int):
        t = time.perf_counter()
        pos = layout_component(comps[i], lp, derive_seed(ap.seed, i))
        pos = rescale_to_density(pos, ap.target_density, ap.l)
        layouts[i] = pos
        infos[i] = ComponentLayoutInfo(
            choose_layout_method(comps[i].n_nodes, ap),
            comps[i].n_nodes,
            time.perf_counter() - t,
        )

    t0 = time.perf_counter()
    if lp.threads > 1:
        with ThreadPoolExecutor(max_workers=lp.threads) as pool:
            list(pool.map(one, range(len(comps))))
    else:
        for i in range(len(comps)):
            one(i)
    timings["component_layouts"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    summaries = [(i, layout_diameter(layouts[i]), comps[i].n_nodes) for i in range(len(comps))]
    mg = build_meta_graph(summaries, ap.spacing_value, derive_seed(ap.seed, 10_000))
    centers = layout_meta(mg, lp, derive_seed(ap.seed, 10_001))
    if ap.max_box_overlap is not None and len(comps) > 1:
        # components translate by centroid, so each placed bounding box is
        # offset from its meta center; relieve the actual box centers
        los = np.array([layouts[i].min(axis=0) for i in range(len(comps))])
        his = np.array([layouts[i].max(axis=0) for i in range(len(comps))])
        centroids = np.array([layouts[i].mean(axis=0) for i in range(len(comps))])
        offsets = (los + his) / 2.0 - centroids
        relieved = relieve_box_overlaps(
            centers + offsets,
            (his - los) / 2.0,
            np.array([c.n_nodes for c in comps], dtype=np.float64),
            ap.max_box_overlap,
            l=ap.l,
        )
        centers = relieved - offsets
    timings["assembly"] = time.perf_counter() - t0

    positions = np.zeros((g.n_nodes, 2))
    for i, comp in enumerate(comps):
        pos = layouts[i]
        positions[comp.node_indices] = pos - pos.mean(axis=0) + centers[i]
    return LayoutResult(positions, infos, timings, layouts, centers)
