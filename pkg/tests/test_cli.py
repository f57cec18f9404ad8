import os
import subprocess
import sys

import pytest

from fmmlayout.cli import cli_main
from fmmlayout.io import read_layout


@pytest.fixture
def tx_file(tmp_path):
    path = tmp_path / "txs.txt"
    assert cli_main(["generate", "--tx-count", "120", "--seed", "3", "--out", str(path)]) == 0
    return path


@pytest.fixture
def edge_file(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("a,b\nb,c\nc,a\nd,e\n")
    return path


class TestLayoutCommand:
    def test_edgelist_layout(self, edge_file, tmp_path, capsys):
        out = tmp_path / "layout.json"
        rc = cli_main(
            ["layout", "--input", str(edge_file), "--format", "edgelist",
             "--out", str(out), "--seed", "7"]
        )
        assert rc == 0
        doc = read_layout(out.read_text())
        assert len(doc.nodes) == 5
        assert doc.provenance["seed"] == 7
        assert "nodes=5" in capsys.readouterr().out

    def test_byte_identical_for_same_seed(self, edge_file, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        for out in (a, b):
            rc = cli_main(
                ["layout", "--input", str(edge_file), "--out", str(out), "--seed", "7"]
            )
            assert rc == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_changes_output(self, edge_file, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        cli_main(["layout", "--input", str(edge_file), "--out", str(a), "--seed", "1"])
        cli_main(["layout", "--input", str(edge_file), "--out", str(b), "--seed", "2"])
        assert a.read_bytes() != b.read_bytes()

    def test_transactions_and_svg(self, tx_file, tmp_path):
        out = tmp_path / "layout.json"
        svg = tmp_path / "layout.svg"
        rc = cli_main(
            ["layout", "--input", str(tx_file), "--format", "transactions",
             "--out", str(out), "--svg", str(svg), "--seed", "1"]
        )
        assert rc == 0
        assert svg.read_text().startswith("<?xml")
        doc = read_layout(out.read_text())
        roles = {n.role for n in doc.nodes}
        assert roles == {"address", "transaction"}

    def test_svg_bytes_deterministic(self, edge_file, tmp_path):
        svgs = []
        for name in ("s1.svg", "s2.svg"):
            svg = tmp_path / name
            cli_main(
                ["layout", "--input", str(edge_file), "--out",
                 str(tmp_path / "l.json"), "--svg", str(svg), "--seed", "5"]
            )
            svgs.append(svg.read_bytes())
        assert svgs[0] == svgs[1]

    def test_missing_input_is_usage_error(self, capsys):
        assert cli_main(["layout", "--out", "x.json"]) == 1
        err = capsys.readouterr().err
        assert "usage" in err

    def test_unknown_flag_rejected(self, edge_file, tmp_path):
        rc = cli_main(
            ["layout", "--input", str(edge_file), "--out",
             str(tmp_path / "x.json"), "--frobnicate"]
        )
        assert rc == 1

    def test_nonexistent_input(self, tmp_path):
        rc = cli_main(
            ["layout", "--input", str(tmp_path / "missing.csv"), "--out",
             str(tmp_path / "x.json")]
        )
        assert rc == 1

    def test_malformed_input(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("not an edge line at all\n")
        rc = cli_main(["layout", "--input", str(bad), "--out", str(tmp_path / "x.json")])
        assert rc == 1

    def test_flags_reach_pipeline(self, edge_file, tmp_path):
        out = tmp_path / "layout.json"
        rc = cli_main(
            ["layout", "--input", str(edge_file), "--out", str(out),
             "--kk-threshold", "2", "--fa2-iters", "30", "--fmm-order", "4",
             "--fmm-leaf", "16", "--density", "0.5", "--spacing", "3.5",
             "--coarsen", "true", "--threads", "2", "--seed", "1"]
        )
        assert rc == 0
        doc = read_layout(out.read_text())
        # threshold 2 pushes the triangle to the force simulation; the
        # 2-node component keeps the fixed pair placement
        assert doc.provenance["methods"] == {"fa2": 1, "pair": 1}

    def test_help_exits_zero(self, capsys):
        assert cli_main(["--help"]) == 0
        assert cli_main(["layout", "--help"]) == 0
        out = capsys.readouterr().out
        assert "--kk-threshold" in out  # defaults are documented
        assert "default: 300" in out


class TestGenerateCommand:
    def test_roundtrip_through_layout(self, tx_file):
        text = tx_file.read_text()
        assert text.startswith("t0|")
        assert len(text.splitlines()) == 120

    def test_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        cli_main(["generate", "--tx-count", "50", "--seed", "9", "--out", str(p1)])
        cli_main(["generate", "--tx-count", "50", "--seed", "9", "--out", str(p2)])
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_count(self, tmp_path):
        rc = cli_main(
            ["generate", "--tx-count", "-5", "--seed", "1", "--out", str(tmp_path / "t.txt")]
        )
        assert rc == 1


class TestBenchCommand:
    def test_emits_table(self, capsys):
        rc = cli_main(["bench", "--n", "1500", "--orders", "4,8"])
        assert rc == 0
        out = capsys.readouterr().out
        header, *rows = [ln for ln in out.splitlines() if ln.strip()]
        assert header.split() == ["N", "p", "max_rel_err", "t_fmm", "t_brute"]
        assert len(rows) == 2
        for row in rows:
            n, p, err, t_fmm, t_brute = row.split()
            assert int(n) == 1500
            assert float(err) < 1.0


class TestNumpyBackendSubprocess:
    def test_numpy_fallback_end_to_end(self, tmp_path):
        edge = tmp_path / "e.csv"
        edge.write_text("a,b\nb,c\nc,a\n")
        out = tmp_path / "np.json"
        env = dict(os.environ, FMMLAYOUT_BACKEND="numpy")
        proc = subprocess.run(
            [sys.executable, "-m", "fmmlayout.cli", "layout", "--input", str(edge),
             "--out", str(out), "--seed", "2"],
            env=env,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        doc = read_layout(out.read_text())
        assert len(doc.nodes) == 3
