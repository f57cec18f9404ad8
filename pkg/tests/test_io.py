import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fmmlayout.graph import parse_edge_list
from fmmlayout.io import (
    FORMAT_VERSION,
    LayoutDocument,
    LayoutDocumentError,
    NodeRecord,
    SvgStyle,
    document_from_layout,
    read_layout,
    render_svg,
    write_layout,
)


def _doc(n=3, with_edges=True):
    nodes = [NodeRecord(f"n{i}", "plain", float(i), float(-i)) for i in range(n)]
    edges = [(f"n{i}", f"n{i+1}") for i in range(n - 1)] if with_edges else []
    return LayoutDocument(nodes, edges, {"seed": 1})


class TestRoundTrip:
    def test_empty_document(self):
        doc = LayoutDocument([], [], {})
        text = write_layout(doc)
        back = read_layout(text)
        assert back.nodes == []
        assert back.edges == []

    def test_three_nodes_identity(self):
        doc = _doc()
        back = read_layout(write_layout(doc))
        assert back.nodes == doc.nodes
        assert back.edges == doc.edges
        assert back.provenance == doc.provenance
        # canonical bytes: serializing again is the identity
        assert write_layout(back) == write_layout(doc)

    def test_large_document_round_trip(self, rng):
        n = 100_000
        nodes = [
            NodeRecord(
                f"v{i}",
                ("address", "transaction", "plain")[i % 3],
                float(rng.normal()),
                float(rng.normal()),
            )
            for i in range(n)
        ]
        edges = [(f"v{i}", f"v{(i * 7 + 1) % n}") for i in range(0, n, 5)]
        edges = [(s, t) for s, t in edges if s != t]
        doc = LayoutDocument(nodes, edges, {"seed": 9})
        text = write_layout(doc)
        back = read_layout(text)
        assert back.nodes == doc.nodes
        assert back.edges == doc.edges
        assert write_layout(back) == text

    def test_from_graph(self):
        g = parse_edge_list("a,b\nb,c")
        doc = document_from_layout(g, np.arange(6).reshape(3, 2).astype(float))
        assert [n.id for n in doc.nodes] == ["a", "b", "c"]
        assert doc.edges == [("a", "b"), ("b", "c")]


class TestReadErrors:
    def test_version_mismatch(self):
        text = write_layout(_doc()).replace(FORMAT_VERSION, "other/9")
        with pytest.raises(LayoutDocumentError, match="format"):
            read_layout(text)

    def test_missing_field(self):
        with pytest.raises(LayoutDocumentError, match="missing"):
            read_layout('{"version": "%s", "nodes": []}' % FORMAT_VERSION)

    def test_nan_coordinate_rejected(self):
        text = write_layout(_doc()).replace('"x":0.0', '"x":NaN')
        with pytest.raises(LayoutDocumentError, match="NaN|finite"):
            read_layout(text)

    def test_truncated_file_reports_byte_offset(self):
        text = write_layout(_doc())
        with pytest.raises(LayoutDocumentError, match="byte offset"):
            read_layout(text[: len(text) // 2])

    def test_truncation_fuzz(self):
        text = write_layout(_doc(5))
        for cut in range(1, len(text) - 2, 7):
            try:
                read_layout(text[:cut])
            except LayoutDocumentError:
                continue
            # a prefix that still parses must be a complete valid document
            assert cut >= len(text) - 1

    def test_edge_with_unknown_endpoint(self):
        with pytest.raises(LayoutDocumentError, match="no node record"):
            LayoutDocument([NodeRecord("a", "plain", 0.0, 0.0)], [("a", "b")])

    def test_nonfinite_positions_rejected_at_build(self):
        with pytest.raises(LayoutDocumentError, match="finite"):
            LayoutDocument([NodeRecord("a", "plain", np.inf, 0.0)], [])

    def test_write_rejects_nonfinite(self):
        doc = _doc()
        doc.nodes[0] = NodeRecord("n0", "plain", 0.0, 0.0)
        text = write_layout(doc)
        assert "Infinity" not in text


class TestSvg:
    def test_empty_document_valid_svg(self):
        svg = render_svg(LayoutDocument([], [], {}))
        root = ET.fromstring(svg)
        assert root.tag.endswith("svg")

    def test_two_circles_one_line(self):
        doc = LayoutDocument(
            [
                NodeRecord("a", "address", 0.0, 0.0),
                NodeRecord("t", "transaction", 1.0, 1.0),
            ],
            [("a", "t")],
        )
        svg = render_svg(doc)
        assert svg.count("<circle") == 2
        assert svg.count("<line") == 1
        # edges drawn first (beneath nodes)
        assert svg.index("<line") < svg.index("<circle")

    def test_role_colors(self):
        doc = LayoutDocument(
            [
                NodeRecord("a", "address", 0.0, 0.0),
                NodeRecord("t", "transaction", 1.0, 0.0),
                NodeRecord("p", "plain", 2.0, 0.0),
            ],
            [],
        )
        style = SvgStyle()
        svg = render_svg(doc, style)
        assert style.color_for("address") in svg
        assert style.color_for("transaction") in svg
        assert style.color_for("plain") in svg

    def test_large_document_is_wellformed_xml(self, rng):
        n = 10_000
        nodes = [
            NodeRecord(f"v{i}", "plain", float(rng.normal()), float(rng.normal()))
            for i in range(n)
        ]
        edges = [(f"v{i}", f"v{(i + 1) % n}") for i in range(n)]
        svg = render_svg(LayoutDocument(nodes, edges, {}))
        root = ET.fromstring(svg)
        assert len(root) == 2  # edge group + node group

    def test_deterministic_bytes(self):
        doc = _doc(10)
        assert render_svg(doc) == render_svg(doc)

    def test_style_validation(self):
        with pytest.raises(ValueError):
            SvgStyle(node_radius=0.0)
        with pytest.raises(ValueError):
            SvgStyle(edge_opacity=0.0)
