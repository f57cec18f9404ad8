"""Graph model, ingestion and synthetic transaction data.

A `Graph` keeps external string ids in first-seen order and stores edges
over dense integer indices.  Nodes may carry a role (address or
transaction); if any node does, every edge must join an address to a
transaction.  Self-loops are dropped (counted), duplicate edges collapse
to the first occurrence regardless of direction, since the layout
algorithms never use direction geometrically.
"""

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

ROLE_PLAIN = 0
ROLE_ADDRESS = 1
ROLE_TRANSACTION = 2

ROLE_NAMES = {ROLE_PLAIN: "plain", ROLE_ADDRESS: "address", ROLE_TRANSACTION: "transaction"}
ROLE_CODES = {v: k for k, v in ROLE_NAMES.items()}


class GraphInputError(ValueError):
    """Malformed external input (edge lists, transaction records)."""


@dataclass
class Graph:
    ids: list[str]
    roles: np.ndarray  # uint8 role codes, all PLAIN when the graph is untyped
    edges: np.ndarray  # (m, 2) int64, direction as ingested
    weights: np.ndarray  # (m,) float64, positive
    dropped_self_loops: int = 0
    dropped_duplicate_edges: int = 0
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.roles = np.asarray(self.roles, dtype=np.uint8)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if len(self.ids) != self.roles.shape[0]:
            raise ValueError("ids and roles length mismatch")
        if self.edges.shape[0] != self.weights.shape[0]:
            raise ValueError("edges and weights length mismatch")
        if self.edges.size and (
            self.edges.min() < 0 or self.edges.max() >= len(self.ids)
        ):
            raise ValueError("edge endpoint out of range")
        if np.any(self.weights <= 0):
            raise ValueError("edge weights must be positive")
        if self.roles.any():
            a = self.roles[self.edges[:, 0]]
            b = self.roles[self.edges[:, 1]]
            ok = ((a == ROLE_ADDRESS) & (b == ROLE_TRANSACTION)) | (
                (a == ROLE_TRANSACTION) & (b == ROLE_ADDRESS)
            )
            if not ok.all():
                e = int(np.nonzero(~ok)[0][0])
                raise ValueError(
                    "role-typed graph must be bipartite; edge "
                    f"{self.ids[self.edges[e, 0]]!r} -> {self.ids[self.edges[e, 1]]!r} is not"
                )
        for arr in (self.roles, self.edges, self.weights):
            arr.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def index_of(self, node_id: str) -> int:
        if self._index is None:
            object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.ids)})
        return self._index[node_id]

    def role_name(self, i: int) -> str:
        return ROLE_NAMES[int(self.roles[i])]


@dataclass(frozen=True)
class Transaction:
    id: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self):
        if not self.id:
            raise ValueError("transaction id must be non-empty")
        if not self.inputs and not self.outputs:
            raise ValueError(f"transaction {self.id!r} has no inputs or outputs")


@dataclass
class Component:
    """Connected piece of a graph, reindexed to dense local ids.

    ``node_indices[k]`` is the parent-graph index of local node k (in
    ascending parent order); ``edges`` use local indices.
    """

    node_indices: np.ndarray
    edges: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.node_indices = np.asarray(self.node_indices, dtype=np.int64)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        for arr in (self.node_indices, self.edges, self.weights):
            arr.setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return self.node_indices.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]


def component_from_edges(n_nodes: int, edges, weights=None) -> Component:
    """Convenience constructor for tests and standalone use."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if weights is None:
        weights = np.ones(edges.shape[0])
    return Component(np.arange(n_nodes), edges, np.asarray(weights, dtype=np.float64))


# --------------------------------------------------------------------------
# construction helpers
# --------------------------------------------------------------------------


class _GraphBuilder:
    def __init__(self):
        self.ids: list[str] = []
        self.roles: list[int] = []
        self.index: dict[str, int] = {}
        self.edges: list[tuple[int, int]] = []
        self.weights: list[float] = []
        self.seen_pairs: set[tuple[int, int]] = set()
        self.self_loops = 0
        self.duplicates = 0

    def node(self, node_id: str, role: int = ROLE_PLAIN) -> int:
        i = self.index.get(node_id)
        if i is None:
            i = len(self.ids)
            self.index[node_id] = i
            self.ids.append(node_id)
            self.roles.append(role)
            return i
        if role != ROLE_PLAIN and self.roles[i] != role:
            if self.roles[i] == ROLE_PLAIN:
                self.roles[i] = role
            else:
                raise GraphInputError(
                    f"node {node_id!r} used both as "
                    f"{ROLE_NAMES[self.roles[i]]} and {ROLE_NAMES[role]}"
                )
        return i

    def edge(self, u: int, v: int, weight: float = 1.0):
        if u == v:
            self.self_loops += 1
            return
        key = (u, v) if u < v else (v, u)
        if key in self.seen_pairs:
            self.duplicates += 1
            return
        self.seen_pairs.add(key)
        self.edges.append((u, v))
        self.weights.append(weight)

    def build(self) -> Graph:
        return Graph(
            ids=self.ids,
            roles=np.array(self.roles, dtype=np.uint8),
            edges=np.array(self.edges, dtype=np.int64).reshape(-1, 2),
            weights=np.array(self.weights, dtype=np.float64),
            dropped_self_loops=self.self_loops,
            dropped_duplicate_edges=self.duplicates,
        )


def _iter_lines(text) -> Iterator[str]:
    if isinstance(text, str):
        yield from text.splitlines()
    else:
        for line in text:
            yield line.rstrip("\n")


def parse_edge_list(text) -> Graph:
    """Parse `source<tab or comma>target[<sep>weight]` lines.

    Blank lines and lines starting with '#' are skipped.  Node ids appear
    in first-seen order.  Raises `GraphInputError` with the 1-based line
    number on malformed lines or non-positive weights.
    """
    b = _GraphBuilder()
    for lineno, raw in enumerate(_iter_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sep = "\t" if "\t" in line else ","
        parts = [p.strip() for p in line.split(sep)]
        if len(parts) not in (2, 3) or not parts[0] or not parts[1]:
            raise GraphInputError(f"line {lineno}: malformed edge {raw!r}")
        weight = 1.0
        if len(parts) == 3:
            try:
                weight = float(parts[2])
            except ValueError:
                raise GraphInputError(
                    f"line {lineno}: bad weight {parts[2]!r}"
                ) from None
            if not np.isfinite(weight) or weight <= 0:
                raise GraphInputError(
                    f"line {lineno}: weight must be positive and finite, got {parts[2]}"
                )
        u = b.node(parts[0])
        v = b.node(parts[1])
        b.edge(u, v, weight)
    return b.build()


def write_edge_list(g: Graph) -> str:
    """Canonical comma-separated edge list; parse(write(g)) == g for
    graphs without isolated nodes."""
    lines = []
    for e in range(g.n_edges):
        u, v = g.edges[e]
        w = float(g.weights[e])
        if w == 1.0:
            lines.append(f"{g.ids[u]},{g.ids[v]}")
        else:
            lines.append(f"{g.ids[u]},{g.ids[v]},{w!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def build_transaction_graph(txs: Sequence[Transaction]) -> Graph:
    """Bipartite graph: one transaction node per tx, one address node per
    distinct address; inputs point address->tx, outputs tx->address."""
    b = _GraphBuilder()
    for tx in txs:
        t = b.node(tx.id, ROLE_TRANSACTION)
        seen_in = set()
        for a in tx.inputs:
            if a in seen_in:
                continue
            seen_in.add(a)
            b.edge(b.node(a, ROLE_ADDRESS), t)
        seen_out = set()
        for a in tx.outputs:
            if a in seen_out:
                continue
            seen_out.add(a)
            b.edge(t, b.node(a, ROLE_ADDRESS))
    return b.build()


def parse_transactions(text) -> list[Transaction]:
    """Parse `txid|in1;in2|out1;out2` records (either side may be empty)."""
    txs = []
    for lineno, raw in enumerate(_iter_lines(text), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 3 or not parts[0]:
            raise GraphInputError(f"line {lineno}: malformed transaction {raw!r}")
        inputs = tuple(a for a in parts[1].split(";") if a)
        outputs = tuple(a for a in parts[2].split(";") if a)
        try:
            txs.append(Transaction(parts[0], inputs, outputs))
        except ValueError as exc:
            raise GraphInputError(f"line {lineno}: {exc}") from None
    return txs


def write_transactions(txs: Iterable[Transaction]) -> str:
    lines = [f"{t.id}|{';'.join(t.inputs)}|{';'.join(t.outputs)}" for t in txs]
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------------------
# components
# --------------------------------------------------------------------------


def connected_components(g: Graph) -> list[Component]:
    """Undirected connected components, largest first (ties: smallest
    contained external id).  Local node order follows parent order."""
    n = g.n_nodes
    if n == 0:
        return []
    # CSR adjacency over both directions
    deg = np.zeros(n, np.int64)
    if g.n_edges:
        np.add.at(deg, g.edges[:, 0], 1)
        np.add.at(deg, g.edges[:, 1], 1)
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(deg, out=indptr[1:])
    adj = np.empty(indptr[-1], np.int64)
    fill = indptr[:-1].copy()
    for e in range(g.n_edges):
        u, v = g.edges[e]
        adj[fill[u]] = v
        fill[u] += 1
        adj[fill[v]] = u
        fill[v] += 1

    label = np.full(n, -1, np.int64)
    n_comp = 0
    stack = []
    for s in range(n):
        if label[s] >= 0:
            continue
        label[s] = n_comp
        stack.append(s)
        while stack:
            u = stack.pop()
            for t in range(indptr[u], indptr[u + 1]):
                v = adj[t]
                if label[v] < 0:
                    label[v] = n_comp
                    stack.append(v)
        n_comp += 1

    members: list[list[int]] = [[] for _ in range(n_comp)]
    for i in range(n):
        members[label[i]].append(i)
    edge_lists: list[list[int]] = [[] for _ in range(n_comp)]
    for e in range(g.n_edges):
        edge_lists[label[g.edges[e, 0]]].append(e)

    order = sorted(
        range(n_comp), key=lambda c: (-len(members[c]), min(g.ids[i] for i in members[c]))
    )
    out = []
    for c in order:
        nodes = np.array(members[c], dtype=np.int64)
        local = {int(p): k for k, p in enumerate(nodes)}
        es = g.edges[edge_lists[c]] if edge_lists[c] else np.empty((0, 2), np.int64)
        ws = g.weights[edge_lists[c]] if edge_lists[c] else np.empty(0)
        led = np.empty_like(es)
        for r in range(es.shape[0]):
            led[r, 0] = local[int(es[r, 0])]
            led[r, 1] = local[int(es[r, 1])]
        out.append(Component(nodes, led, ws))
    return out


# --------------------------------------------------------------------------
# synthetic transaction data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticParams:
    """Shape of generated transactions.

    Input/output counts are 1 + Poisson(mean_extra_*); a coinbase-like
    transaction (no inputs) appears with probability coinbase_prob.  Each
    input/output reuses a previously seen address with probability
    address_reuse, which is what ties transactions into a giant component
    while leaving most components tiny.
    """

    mean_extra_inputs: float = 0.6
    mean_extra_outputs: float = 1.1
    coinbase_prob: float = 0.01
    address_reuse: float = 0.35

    def __post_init__(self):
        if self.mean_extra_inputs < 0 or self.mean_extra_outputs < 0:
            raise ValueError("mean extra input/output counts must be >= 0")
        if not 0 <= self.coinbase_prob <= 1:
            raise ValueError("coinbase_prob must be in [0, 1]")
        if not 0 <= self.address_reuse <= 1:
            raise ValueError("address_reuse must be in [0, 1]")


def generate_synthetic_transactions(
    n_tx: int, seed: int, params: SyntheticParams | None = None
) -> list[Transaction]:
    """Deterministic synthetic transaction stream (fixed seed => fixed
    output) whose graph has a heavy-tailed component size distribution."""
    if n_tx < 0:
        raise ValueError("n_tx must be >= 0")
    params = params or SyntheticParams()
    rng = np.random.default_rng(seed)
    pool: list[str] = []
    next_addr = 0
    txs = []

    def pick_address() -> str:
        nonlocal next_addr
        if pool and rng.random() < params.address_reuse:
            return pool[int(rng.integers(len(pool)))]
        a = f"a{next_addr}"
        next_addr += 1
        pool.append(a)
        return a

    for t in range(n_tx):
        n_in = 0 if rng.random() < params.coinbase_prob else 1 + int(
            rng.poisson(params.mean_extra_inputs)
        )
        n_out = 1 + int(rng.poisson(params.mean_extra_outputs))
        inputs = tuple(dict.fromkeys(pick_address() for _ in range(n_in)))
        outputs = tuple(dict.fromkeys(pick_address() for _ in range(n_out)))
        txs.append(Transaction(f"t{t}", inputs, outputs))
    return txs
