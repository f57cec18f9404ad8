"""Layout serialization and SVG rendering.

The layout document is a versioned JSON object carrying node records
(external id, role, coordinates), edge records, and provenance (seed,
a hash of the parameters, per-stage timings).  Serialization is canonical
(sorted keys, no whitespace), so identical documents give identical
bytes and the write/read pair is an exact round trip.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import ROLE_NAMES, Graph

FORMAT_VERSION = "fmmlayout-layout/1"


class LayoutDocumentError(ValueError):
    """Unreadable or inconsistent layout document."""


@dataclass
class NodeRecord:
    id: str
    role: str
    x: float
    y: float


@dataclass
class LayoutDocument:
    nodes: list[NodeRecord]
    edges: list[tuple[str, str]]
    provenance: dict = field(default_factory=dict)
    version: str = FORMAT_VERSION

    def __post_init__(self):
        ids = {n.id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise LayoutDocumentError("duplicate node ids in layout document")
        for s, t in self.edges:
            if s not in ids or t not in ids:
                raise LayoutDocumentError(f"edge endpoint {s!r}->{t!r} has no node record")
        for n in self.nodes:
            if not (math.isfinite(n.x) and math.isfinite(n.y)):
                raise LayoutDocumentError(f"node {n.id!r} has non-finite coordinates")
            if n.role not in ROLE_NAMES.values():
                raise LayoutDocumentError(f"node {n.id!r} has unknown role {n.role!r}")


def document_from_layout(g: Graph, positions: np.ndarray, provenance: dict | None = None) -> LayoutDocument:
    pos = np.asarray(positions, dtype=np.float64)
    if pos.shape != (g.n_nodes, 2):
        raise ValueError("positions do not match the graph's node count")
    nodes = [
        NodeRecord(g.ids[i], g.role_name(i), float(pos[i, 0]), float(pos[i, 1]))
        for i in range(g.n_nodes)
    ]
    edges = [(g.ids[int(u)], g.ids[int(v)]) for u, v in g.edges]
    return LayoutDocument(nodes, edges, provenance or {})


def params_hash(obj) -> str:
    """Stable short hash of a parameter mapping for provenance."""
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_layout(doc: LayoutDocument) -> str:
    payload = {
        "version": doc.version,
        "nodes": [
            {"id": n.id, "role": n.role, "x": n.x, "y": n.y} for n in doc.nodes
        ],
        "edges": [{"source": s, "target": t} for s, t in doc.edges],
        "provenance": doc.provenance,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def _reject_constant(name):
    raise LayoutDocumentError(f"non-finite coordinate constant {name!r} in document")


def read_layout(text: str) -> LayoutDocument:
    try:
        payload = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode())
        raise LayoutDocumentError(
            f"unparseable layout document at byte offset {offset}: {exc.msg}"
        ) from None
    if not isinstance(payload, dict):
        raise LayoutDocumentError("layout document must be a JSON object")
    version = payload.get("version")
    if version != FORMAT_VERSION:
        raise LayoutDocumentError(
            f"unsupported layout format {version!r}, expected {FORMAT_VERSION!r}"
        )
    for key in ("nodes", "edges", "provenance"):
        if key not in payload:
            raise LayoutDocumentError(f"layout document is missing {key!r}")
    nodes = []
    for rec in payload["nodes"]:
        try:
            nodes.append(
                NodeRecord(rec["id"], rec["role"], float(rec["x"]), float(rec["y"]))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise LayoutDocumentError(f"bad node record {rec!r}: {exc}") from None
    edges = []
    for rec in payload["edges"]:
        try:
            edges.append((rec["source"], rec["target"]))
        except (KeyError, TypeError) as exc:
            raise LayoutDocumentError(f"bad edge record {rec!r}: {exc}") from None
    return LayoutDocument(nodes, edges, payload["provenance"], version)


# --------------------------------------------------------------------------
# SVG
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SvgStyle:
    node_radius: float = 2.0
    role_colors: tuple = (
        ("plain", "#7f7f7f"),
        ("address", "#1f77b4"),
        ("transaction", "#d62728"),
    )
    edge_color: str = "#555555"
    edge_width: float = 0.5
    edge_opacity: float = 0.15  # low so dense areas stay readable
    padding: float = 10.0

    def __post_init__(self):
        if not self.node_radius > 0:
            raise ValueError("node_radius must be positive")
        if not 0 < self.edge_opacity <= 1:
            raise ValueError("edge_opacity must be in (0, 1]")

    def color_for(self, role: str) -> str:
        return dict(self.role_colors).get(role, "#7f7f7f")


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(doc: LayoutDocument, style: SvgStyle | None = None) -> str:
    """One circle per node (colored by role) over one line per edge."""
    style = style or SvgStyle()
    if doc.nodes:
        xs = [n.x for n in doc.nodes]
        ys = [n.y for n in doc.nodes]
        x0, x1 = min(xs) - style.padding, max(xs) + style.padding
        y0, y1 = min(ys) - style.padding, max(ys) + style.padding
    else:
        x0, y0, x1, y1 = 0.0, 0.0, 1.0, 1.0
    pos = {n.id: (n.x, n.y) for n in doc.nodes}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} '
        f'{_fmt(x1 - x0)} {_fmt(y1 - y0)}">',
        f'<g stroke="{style.edge_color}" stroke-width="{_fmt(style.edge_width)}" '
        f'stroke-opacity="{style.edge_opacity}">',
    ]
    for s, t in doc.edges:
        sx, sy = pos[s]
        tx, ty = pos[t]
        out.append(
            f'<line x1="{_fmt(sx)}" y1="{_fmt(sy)}" x2="{_fmt(tx)}" y2="{_fmt(ty)}"/>'
        )
    out.append("</g>")
    out.append("<g>")
    for n in doc.nodes:
        out.append(
            f'<circle cx="{_fmt(n.x)}" cy="{_fmt(n.y)}" r="{_fmt(style.node_radius)}" '
            f'fill="{style.color_for(n.role)}"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
