"""Command line interface.

Subcommands:

* ``layout``   -- read an edge list or transaction records, compute the
                  full layout, write the JSON document and optional SVG.
* ``generate`` -- write a synthetic transaction-record file.
* ``bench``    -- multipole vs brute-force accuracy/timing table, and
                  optionally the numba vs numpy kernel backends.

Exit codes: 0 success, 1 input/usage error, 2 internal error.
"""

import argparse
import sys
import time
from dataclasses import replace

import numpy as np

from . import _kernels
from .assembler import AssemblyParams, LayoutParams, default_fa2_params, layout_graph
from .fmm import FmmParams, brute_force_repulsion, evaluate_repulsion
from .graph import (
    GraphInputError,
    build_transaction_graph,
    generate_synthetic_transactions,
    parse_edge_list,
    parse_transactions,
    write_transactions,
)
from .io import SvgStyle, document_from_layout, params_hash, render_svg, write_layout


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage errors to 1
        raise _UsageError(message)


def _str2bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


def build_parser() -> _Parser:
    parser = _Parser(prog="fmmlayout", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("layout", help="lay out a graph file", formatter_class=fmt)
    p.add_argument("--input", required=True, help="input file path")
    p.add_argument(
        "--format", choices=("edgelist", "transactions"), default="edgelist",
        help="input file format",
    )
    p.add_argument("--out", required=True, help="layout JSON output path")
    p.add_argument("--svg", default=None, help="optional SVG output path")
    p.add_argument("--seed", type=int, default=0, help="global random seed")
    p.add_argument("--kk-threshold", type=int, default=300,
                   help="components below this node count use the stress layout")
    p.add_argument("--fa2-iters", type=int, default=500,
                   help="force-simulation iterations for large components")
    p.add_argument("--fmm-order", type=int, default=8, help="multipole series order")
    p.add_argument("--fmm-leaf", type=int, default=32, help="quadtree leaf capacity")
    p.add_argument("--density", type=float, default=1.0,
                   help="target nodes per unit area after rescaling")
    p.add_argument("--spacing", type=float, default=None,
                   help="extra distance between assembled components (default 2*l)")
    p.add_argument("--coarsen", type=_str2bool, default=False, metavar="BOOL",
                   help="contract degree-1/degree-2 nodes before the stress layout")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for per-component layout")
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("generate", help="write synthetic transaction records",
                       formatter_class=fmt)
    p.add_argument("--tx-count", type=int, required=True, help="number of transactions")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--out", required=True, help="output file path")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("bench", help="repulsion solver benchmark", formatter_class=fmt)
    p.add_argument("--n", type=int, default=20000, help="number of points")
    p.add_argument("--orders", default="4,8,16", help="comma-separated series orders")
    p.add_argument("--seed", type=int, default=0, help="point-set seed")
    p.add_argument("--backends", action="store_true",
                   help="also compare the numba and numpy kernel backends")
    p.set_defaults(func=_cmd_bench)
    return parser


def _read_graph(path: str, fmt: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from None
    if fmt == "transactions":
        return build_transaction_graph(parse_transactions(text))
    return parse_edge_list(text)


def _cmd_layout(args) -> int:
    t_start = time.perf_counter()
    g = _read_graph(args.input, args.format)
    assembly = AssemblyParams(
        kk_threshold=args.kk_threshold,
        target_density=args.density,
        spacing=args.spacing,
        seed=args.seed,
        coarsen=args.coarsen,
    )
    fa2 = replace(default_fa2_params(), iterations=args.fa2_iters)
    fmm = FmmParams(order=args.fmm_order, leaf_capacity=args.fmm_leaf)
    lp = LayoutParams(assembly=assembly, fa2=fa2, fmm=fmm, threads=args.threads)
    result = layout_graph(g, lp)
    methods = {}
    for info in result.components:
        methods[info.method] = methods.get(info.method, 0) + 1
    # wall-clock timings go to stdout, not into the document: output bytes
    # must be identical across runs with the same seed
    provenance = {
        "seed": args.seed,
        "params_hash": params_hash(
            {
                "format": args.format,
                "seed": args.seed,
                "kk_threshold": args.kk_threshold,
                "fa2_iters": args.fa2_iters,
                "fmm_order": args.fmm_order,
                "fmm_leaf": args.fmm_leaf,
                "density": args.density,
                "spacing": args.spacing,
                "coarsen": args.coarsen,
                "backend": _kernels.BACKEND,
            }
        ),
        "methods": methods,
        "stages": ["components", "component_layouts", "assembly"],
    }
    doc = document_from_layout(g, result.positions, provenance)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(write_layout(doc))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(render_svg(doc, SvgStyle()))
    stage_times = " ".join(f"{k}={v:.2f}s" for k, v in result.timings.items())
    print(
        f"nodes={g.n_nodes} edges={g.n_edges} components={len(result.components)} "
        f"methods={methods} {stage_times} "
        f"total={time.perf_counter() - t_start:.2f}s wrote={args.out}"
    )
    return 0


def _cmd_generate(args) -> int:
    txs = generate_synthetic_transactions(args.tx_count, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(write_transactions(txs))
    print(f"transactions={len(txs)} wrote={args.out}")
    return 0


def _cmd_bench(args) -> int:
    orders = [int(v) for v in args.orders.split(",") if v.strip()]
    rng = np.random.default_rng(args.seed)
    pts = rng.uniform(0.0, 100.0, (args.n, 2))
    t0 = time.perf_counter()
    brute = brute_force_repulsion(pts, 1.0)
    t_brute = time.perf_counter() - t0
    norm = np.linalg.norm(brute, axis=1) + 1e-12
    print(f"{'N':>8} {'p':>4} {'max_rel_err':>12} {'t_fmm':>8} {'t_brute':>8}")
    for p in orders:
        params = FmmParams(order=p, k_r=1.0)
        t0 = time.perf_counter()
        res = evaluate_repulsion(pts, params)
        t_fmm = time.perf_counter() - t0
        err = float((np.linalg.norm(res.forces - brute, axis=1) / norm).max())
        print(f"{args.n:>8} {p:>4} {err:>12.3e} {t_fmm:>8.3f} {t_brute:>8.3f}")
    if args.backends:
        print(f"\n{'kernel backend':>16} {'t_fmm':>8} {'t_brute':>8}")
        for name in ("numba", "numpy"):
            try:
                impl = _kernels.get_impl(name)
            except Exception:
                print(f"{name:>16} {'n/a':>8} {'n/a':>8}")
                continue
            params = FmmParams(order=8, k_r=1.0)
            evaluate_repulsion(pts[:256], params, impl=impl)  # warm any compile
            t0 = time.perf_counter()
            evaluate_repulsion(pts, params, impl=impl)
            t_f = time.perf_counter() - t0
            t0 = time.perf_counter()
            brute_force_repulsion(pts, 1.0, impl=impl)
            t_b = time.perf_counter() - t0
            print(f"{name:>16} {t_f:>8.3f} {t_b:>8.3f}")
    return 0


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (GraphInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
