"""Adaptive quadtree over 2D points.

The tree is stored as flat arrays (cells in BFS creation order) so the
compiled kernels can traverse it; `QuadTree` is a thin view with the
query operations.  A cell is subdivided exactly when it holds more than
``leaf_capacity`` points and is above ``max_depth``; subdivision always
creates all four quarter squares, so empty leaves exist.  Every cell
owns a contiguous slice ``perm[start:start+count]`` listing the point
indices of its whole subtree.
"""

from dataclasses import dataclass, field

import numpy as np

from .._kernels import active
from .params import FmmParams

_NBR_WIDTH = 12
_M2L_WIDTH = 36
_P2L_WIDTH = 12


@dataclass
class QuadTree:
    points: np.ndarray  # original (n, 2) coordinates
    shifted_x: np.ndarray  # root-centered copies used by all kernels
    shifted_y: np.ndarray
    root_center: np.ndarray  # (2,) offset removed from the inputs
    centers: np.ndarray  # (ncells, 2), root-centered frame
    halves: np.ndarray
    parent: np.ndarray
    child0: np.ndarray  # first of 4 contiguous children, -1 for leaves
    depth: np.ndarray
    start: np.ndarray
    count: np.ndarray
    perm: np.ndarray
    params: FmmParams
    impl: object = None  # kernel module; defaults to the active backend
    _lists: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.impl is None:
            self.impl = active

    @property
    def n_cells(self) -> int:
        return self.centers.shape[0]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def is_leaf(self, cell: int) -> bool:
        return self.child0[cell] < 0

    def children(self, cell: int):
        f = int(self.child0[cell])
        return [] if f < 0 else [f, f + 1, f + 2, f + 3]

    def cell_points(self, cell: int) -> np.ndarray:
        """Indices of all points in the cell's subtree."""
        s = int(self.start[cell])
        return self.perm[s : s + int(self.count[cell])]

    def leaves(self) -> np.ndarray:
        return np.nonzero(self.child0 < 0)[0]

    def locate(self, x: float, y: float) -> int:
        """Leaf cell containing the point (same quadrant rule as the build)."""
        sx = x - self.root_center[0]
        sy = y - self.root_center[1]
        c = 0
        while self.child0[c] >= 0:
            q = int(sx >= self.centers[c, 0]) + 2 * int(sy >= self.centers[c, 1])
            c = int(self.child0[c]) + q
        return c

    def _ensure_lists(self):
        if "nbr" in self._lists:
            return
        nc = self.n_cells
        nbr = np.full((nc, _NBR_WIDTH), -1, np.int64)
        nbr_cnt = np.zeros(nc, np.int64)
        self.impl.build_neighbor_lists(
            self.centers[:, 0],
            self.centers[:, 1],
            self.halves,
            self.child0,
            self.depth,
            nbr,
            nbr_cnt,
        )
        if nbr_cnt.max(initial=0) > 8:
            raise AssertionError("neighbor list exceeded the 8-cell bound")
        m2l = np.full((nc, _M2L_WIDTH), -1, np.int64)
        m2l_cnt = np.zeros(nc, np.int64)
        p2l = np.full((nc, _P2L_WIDTH), -1, np.int64)
        p2l_cnt = np.zeros(nc, np.int64)
        self.impl.build_interaction_lists(
            self.centers[:, 0],
            self.centers[:, 1],
            self.halves,
            self.parent,
            self.child0,
            nbr,
            nbr_cnt,
            m2l,
            m2l_cnt,
            p2l,
            p2l_cnt,
        )
        self._lists.update(
            nbr=nbr, nbr_cnt=nbr_cnt, m2l=m2l, m2l_cnt=m2l_cnt, p2l=p2l, p2l_cnt=p2l_cnt
        )

    def neighbor_arrays(self):
        self._ensure_lists()
        li = self._lists
        return li["nbr"], li["nbr_cnt"]

    def interaction_arrays(self):
        """(m2l, m2l_cnt, p2l, p2l_cnt): same-depth vs coarse-leaf far cells."""
        self._ensure_lists()
        li = self._lists
        return li["m2l"], li["m2l_cnt"], li["p2l"], li["p2l_cnt"]


def build_quadtree(points, params: FmmParams | None = None, impl=None) -> QuadTree:
    """Build the adaptive quadtree; the root square is the bounding square
    of the points expanded by a 1e-9 relative margin (halfwidth rounded up
    to a power of two so cell geometry stays exact)."""
    params = params or FmmParams()
    impl = impl or active
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    if pts.shape[0] == 0:
        raise ValueError("cannot build a quadtree over zero points")
    if not np.isfinite(pts).all():
        raise ValueError("points contain non-finite coordinates")
    (
        sx,
        sy,
        cx0,
        cy0,
        ccx,
        ccy,
        half,
        parent,
        child0,
        depth,
        start,
        count,
        perm,
    ) = impl.build_quadtree_arrays(
        pts[:, 0].copy(), pts[:, 1].copy(), params.leaf_capacity, params.max_depth
    )
    return QuadTree(
        points=pts,
        shifted_x=sx,
        shifted_y=sy,
        root_center=np.array([cx0, cy0]),
        centers=np.stack([ccx, ccy], axis=1),
        halves=half,
        parent=parent,
        child0=child0,
        depth=depth,
        start=start,
        count=count,
        perm=perm,
        params=params,
        impl=impl,
    )


def neighbor_cells(tree: QuadTree, cell: int) -> list[int]:
    """Cells touching ``cell`` (edge or corner) of minimal size not
    smaller than it.  For a uniform tree these are the <=8 same-level
    adjacent cells; the root has none."""
    if not 0 <= cell < tree.n_cells:
        raise IndexError(f"cell {cell} not in tree")
    nbr, cnt = tree.neighbor_arrays()
    return [int(v) for v in nbr[cell, : cnt[cell]]]


def interaction_list(tree: QuadTree, cell: int) -> list[int]:
    """Far cells handled at this cell's level.

    The minimal cells adjacent to the parent, or children of cells
    adjacent to the parent, excluding the cell itself and its own
    neighbors.  Every returned cell is separated from ``cell`` by at
    least the cell's own width, which keeps the series translations
    convergent (same-depth members are converted multipole-to-local;
    coarse leaf members enter point-by-point).
    """
    if not 0 <= cell < tree.n_cells:
        raise IndexError(f"cell {cell} not in tree")
    m2l, m2l_cnt, p2l, p2l_cnt = tree.interaction_arrays()
    out = [int(v) for v in m2l[cell, : m2l_cnt[cell]]]
    out.extend(int(v) for v in p2l[cell, : p2l_cnt[cell]])
    return out
