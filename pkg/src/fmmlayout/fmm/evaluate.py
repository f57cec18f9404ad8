"""All-pairs repulsion: O(n) multipole pipeline and the O(n^2) oracle.

The pipeline runs P2M at the leaves, M2M up the tree, then per cell an
L2L from the parent plus M2L from same-depth far cells and P2L from
coarse leaf cells, and finally evaluates the local series at each point
and adds the near field (own leaf and the subtrees of its neighbor
cells) directly.  Every ordered point pair is accounted exactly once;
`pair_interaction_counts` audits that bookkeeping.
"""

from typing import NamedTuple

import numpy as np

from .._kernels import active
from .. import _series as algebra
from .params import FmmParams
from .quadtree import QuadTree, build_quadtree


class RepulsionResult(NamedTuple):
    forces: np.ndarray  # (n, 2)
    skipped_pairs: int  # ordered coincident pairs left out of the sum
    degenerate: np.ndarray  # bool mask of nodes with a coincident partner


def evaluate_repulsion(
    points, params: FmmParams | None = None, impl=None
) -> RepulsionResult:
    """Repulsion forces (magnitude k_r/r) on every point from every other.

    Coincident point pairs contribute no force; they are counted and the
    involved nodes flagged so the caller can jitter and retry.
    """
    params = params or FmmParams()
    tree = build_quadtree(points, params, impl)
    return repulsion_from_tree(tree)


def repulsion_from_tree(tree: QuadTree) -> RepulsionResult:
    params = tree.params
    impl = tree.impl
    n = tree.n_points
    order = params.order
    nbr, nbr_cnt = tree.neighbor_arrays()
    m2l, m2l_cnt, p2l, p2l_cnt = tree.interaction_arrays()
    binom = algebra.binomial_table(order)
    outgoing = np.zeros((tree.n_cells, order + 1), np.complex128)
    incoming = np.zeros((tree.n_cells, order + 1), np.complex128)
    cx = tree.centers[:, 0]
    cy = tree.centers[:, 1]
    impl.upward_pass(
        tree.shifted_x,
        tree.shifted_y,
        tree.perm,
        tree.start,
        tree.count,
        tree.child0,
        cx,
        cy,
        order,
        binom,
        outgoing,
    )
    impl.downward_pass(
        tree.shifted_x,
        tree.shifted_y,
        tree.perm,
        tree.start,
        tree.count,
        tree.parent,
        cx,
        cy,
        order,
        binom,
        m2l,
        m2l_cnt,
        p2l,
        p2l_cnt,
        outgoing,
        incoming,
    )
    fx = np.zeros(n)
    fy = np.zeros(n)
    degen = np.zeros(n, np.uint8)
    skipped = impl.evaluate_forces(
        tree.shifted_x,
        tree.shifted_y,
        tree.perm,
        tree.start,
        tree.count,
        tree.child0,
        cx,
        cy,
        order,
        incoming,
        nbr,
        nbr_cnt,
        params.k_r,
        fx,
        fy,
        degen,
    )
    return RepulsionResult(np.stack([fx, fy], axis=1), int(skipped), degen.astype(bool))


def brute_force_repulsion(points, k_r: float = 1.0, impl=None) -> np.ndarray:
    """Exact pairwise repulsion sum; the quadratic-cost oracle the
    multipole path is tested against.  Coincident pairs are skipped."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    out = np.zeros_like(pts)
    (impl or active).brute_repulsion(pts, k_r, out)
    return out


def pair_interaction_counts(tree: QuadTree) -> np.ndarray:
    """How often each ordered point pair is accounted by the pipeline.

    Row i counts the sources contributing to the force on point i: the
    near field at i's leaf plus one series translation (M2L or P2L) at
    exactly one cell on i's ancestor chain.  A correct decomposition is
    all ones off the diagonal, zeros on it.
    """
    n = tree.n_points
    counts = np.zeros((n, n), np.int32)
    nbr, nbr_cnt = tree.neighbor_arrays()
    m2l, m2l_cnt, p2l, p2l_cnt = tree.interaction_arrays()
    for c in range(tree.n_cells):
        if tree.count[c] == 0:
            continue
        own = tree.cell_points(c)
        if tree.is_leaf(c):
            counts[np.ix_(own, own)] += 1
            counts[own, own] -= 1
            for d in nbr[c, : nbr_cnt[c]]:
                src = tree.cell_points(int(d))
                if src.size:
                    counts[np.ix_(own, src)] += 1
        for d in m2l[c, : m2l_cnt[c]]:
            src = tree.cell_points(int(d))
            if src.size:
                counts[np.ix_(own, src)] += 1
        for d in p2l[c, : p2l_cnt[c]]:
            src = tree.cell_points(int(d))
            if src.size:
                counts[np.ix_(own, src)] += 1
    return counts
