"""Command-line pipeline: generate, preprocess, partition, order, metrics,
bench and replication.  Every command writes CSV/text files into ``--out``.

Exit codes: 0 ok, 1 invalid input or parameters, 2 I/O or file format
error, 3 partition written but balance constraints unmet.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import generators
from .analytics import (bfs, count_subgraphs, distribute, pagerank, sssp_delta, trace_report)
from .analytics.subgraph import TemplateTree, path_template
from .errors import DomainError, GraphFormatError
from .graph import apply_ordering, degree_stats, preprocess, symmetrize
from .io import FORMATS, load_graph, save_graph
from .metrics import layout_report, replication_ratio, write_report
from .ordering import Ordering, load_ordering, order_global, order_per_part, save_ordering
from .partition import (Partition, PartitionConfig, load_partition, partition_block, partition_lp,
                        partition_random, save_partition)

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_VIOLATION = 0, 1, 2, 3
PARTITIONERS = ("random", "block", "lp", "lp-m", "lp-mm", "file")
EXTENSIONS = {"edgelist": "txt", "metis": "graph", "csr": "csr"}


def _globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="64-bit seed for every random choice")
    parser.add_argument("--out", default=d("."), help="output directory")
    parser.add_argument("--format", choices=FORMATS, default=d("edgelist"), help="graph file format")


def _input(parser):
    parser.add_argument("input", help="graph file")
    parser.add_argument("--directed", action="store_true", help="treat edge-list input as directed")


def _layout(parser, ordering=True):
    parser.add_argument("--parts", type=int, default=1, help="number of parts p")
    parser.add_argument("--partitioner", choices=PARTITIONERS, default="lp-mm")
    parser.add_argument("--partition", dest="partition_file", help="partition file (partitioner 'file')")
    parser.add_argument("--mode", choices=("m", "mm"), help="objective set for 'lp'")
    parser.add_argument("--vbal", type=float, default=1.10, help="vertex imbalance limit")
    parser.add_argument("--ebal", type=float, default=1.50, help="edge imbalance limit")
    parser.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                        help="serial label-propagation sweeps (default on)")
    if ordering:
        parser.add_argument("--ordering", choices=("none", "random", "rcm", "dgl"), default="none")
        parser.add_argument("--ordering-file", help="permutation file, line i = new id of vertex i")
        parser.add_argument("--scope", choices=("global", "per-part"), default="global")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphlayout", description="Graph layout and analytics pipeline.")
    _globals(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic graph")
    g.add_argument("kind", choices=generators.KINDS)
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--m", type=int, default=3000, help="edges for gnm")
    g.add_argument("--blocks", type=int, default=10)
    g.add_argument("--block-size", type=int, default=100)
    g.add_argument("--p-in", type=float, default=0.1)
    g.add_argument("--p-out", type=float, default=0.001)
    g.add_argument("--attach", type=int, default=3)
    g.add_argument("--locality", type=float, default=0.0)
    g.add_argument("--k", type=int, default=5, help="clique size for clique-pair")
    g.add_argument("--weights", action="store_true", help="attach integer weights in [1, 255]")
    g.add_argument("--name", help="output file stem (default: kind)")

    p = sub.add_parser("preprocess", parents=[common], help="clean and keep the largest component")
    _input(p)

    p = sub.add_parser("partition", parents=[common], help="partition and report balance/cut")
    _input(p)
    _layout(p, ordering=False)

    p = sub.add_parser("order", parents=[common], help="relabel vertices and report locality")
    _input(p)
    _layout(p)
    p.add_argument("--root", type=int, help="pin the BFS root (global scope)")

    p = sub.add_parser("metrics", parents=[common], help="layout metrics for given files")
    _input(p)
    _layout(p)
    p.add_argument("--hops", type=int, help="also report the replication ratio")

    p = sub.add_parser("bench", parents=[common], help="run an analytic over p simulated tasks")
    _input(p)
    _layout(p)
    p.add_argument("--analytic", choices=("pagerank", "bfs", "sssp", "count"), required=True)
    p.add_argument("--iters", type=int, default=20, help="PageRank iterations or colouring rounds")
    p.add_argument("--delta", type=float, help="SSSP bucket width (default: heuristic, 'inf' allowed)")
    p.add_argument("--root", type=int, default=0, help="BFS/SSSP source (input ids)")
    p.add_argument("--template", help="tree template edge list (default: 3-vertex path)")
    p.add_argument("--no-filter", action="store_true", help="disable the SSSP remote-request filter")
    p.add_argument("--figures", action="store_true", help="also render timeline PNGs")

    p = sub.add_parser("replication", parents=[common], help="replication ratio per hop count")
    _input(p)
    _layout(p, ordering=False)
    p.add_argument("--hops", type=int, nargs="+", default=[1, 2])
    return ap


def _stem(path: str) -> str:
    base = os.path.basename(path)
    return base.rsplit(".", 1)[0] if "." in base else base


def _path(args, name: str) -> str:
    return os.path.join(args.out, name)


def _load(args):
    return load_graph(args.input, args.format, directed=args.directed)


def _undirected(g):
    return symmetrize(g) if g.directed else g


def _partition(args, g) -> tuple[Partition, str]:
    """Partition from flags; LP runs on the undirected view."""
    und = _undirected(g)
    kind = args.partitioner
    if args.partition_file and kind != "file":
        kind = "file"
    if kind == "file":
        if not args.partition_file:
            raise DomainError("partitioner 'file' needs --partition")
        part = load_partition(args.partition_file, None, g)
        return part, "file"
    if args.parts < 1:
        raise DomainError("--parts must be >= 1")
    if kind == "random":
        return partition_random(g, args.parts, args.seed), kind
    if kind == "block":
        return partition_block(g, args.parts), kind
    mode = {"lp-m": "M", "lp-mm": "MM"}.get(kind) or (args.mode or "mm").upper()
    cfg = PartitionConfig(args.parts, args.vbal, args.ebal, seed=args.seed, mode=mode,
                          deterministic=args.deterministic)
    part = partition_lp(und, cfg)
    if g is not und:
        part = part.with_graph(g)
    return part, f"lp-{mode.lower()}"


def _ordering(args, g, part) -> tuple[Ordering | None, str]:
    if args.ordering_file:
        return load_ordering(args.ordering_file, g.n), "file"
    if args.ordering == "none":
        return None, "none"
    und = _undirected(g)
    root = getattr(args, "root", None) if args.command == "order" else None
    if args.scope == "per-part":
        return order_per_part(und, part, args.ordering, args.seed), f"{args.ordering}-per-part"
    return order_global(und, args.ordering, args.seed, root), args.ordering


def _print_notes(part) -> None:
    for note in part.notes or []:
        print(f"constraint violated: {note}", file=sys.stderr)


def cmd_generate(args) -> int:
    kw = dict(n=args.n, m=args.m, blocks=args.blocks, block_size=args.block_size, p_in=args.p_in,
              p_out=args.p_out, attach=args.attach, locality=args.locality, k=args.k)
    g = generators.generate(args.kind, args.seed, **kw)
    if args.weights:
        g = generators.with_random_weights(g, 1, 255, args.seed)
    path = _path(args, f"{args.name or args.kind}.{EXTENSIONS[args.format]}")
    save_graph(g, path, args.format)
    print(f"{path}: n={g.n} edges={g.num_edges}")
    return EXIT_OK


def cmd_preprocess(args) -> int:
    g = _load(args)
    clean, id_map = preprocess(g)
    stem = _stem(args.input)
    path = _path(args, f"{stem}.pre.{EXTENSIONS[args.format]}")
    save_graph(clean, path, args.format)
    with open(_path(args, f"{stem}.idmap"), "w") as fh:
        fh.writelines(f"{k}\n" for k in id_map.tolist())
    st = degree_stats(clean)
    print(f"{path}: n={clean.n} edges={clean.num_edges} d_avg={float(st.d_avg):.3f} d_max={st.d_max}")
    return EXIT_OK


def cmd_partition(args) -> int:
    g = _load(args)
    part, name = _partition(args, g)
    stem = _stem(args.input)
    save_partition(part, _path(args, f"{stem}.part"))
    rep = layout_report(g, part, graph_name=stem, partitioner=name, ordering="none", seed=args.seed,
                        baseline=partition_random(g, part.p, args.seed))
    sys.stdout.write(write_report([rep], _path(args, f"{stem}.partition.csv")))
    if part.violation:
        _print_notes(part)
        return EXIT_VIOLATION
    return EXIT_OK


def _with_part(args, g):
    if args.partition_file or args.parts > 1 or args.partitioner == "file":
        return _partition(args, g)
    return Partition.from_assignment(g, np.zeros(g.n, dtype=np.int64), 1), "none"


def cmd_order(args) -> int:
    g = _load(args)
    part, pname = _with_part(args, g)
    ordering, oname = _ordering(args, g, part)
    if ordering is None:
        raise DomainError("choose --ordering or --ordering-file")
    stem = _stem(args.input)
    save_ordering(ordering, _path(args, f"{stem}.order"))
    rep = layout_report(g, part, apply_ordering(_undirected(g), ordering), graph_name=stem,
                        partitioner=pname, ordering=oname, seed=args.seed)
    sys.stdout.write(write_report([rep], _path(args, f"{stem}.order.csv")))
    return EXIT_OK


def cmd_metrics(args) -> int:
    g = _load(args)
    part, pname = _with_part(args, g)
    ordering, oname = _ordering(args, g, part)
    ordered = _undirected(g) if ordering is None else apply_ordering(_undirected(g), ordering)
    stem = _stem(args.input)
    rep = layout_report(g, part, ordered, graph_name=stem, partitioner=pname, ordering=oname, seed=args.seed,
                        hops=args.hops, baseline=partition_random(g, part.p, args.seed))
    sys.stdout.write(write_report([rep], _path(args, f"{stem}.metrics.csv")))
    return EXIT_OK


def run_bench(g, part, ordering, analytic, *, iters=20, delta=None, root=0, template=None, seed=0,
              filter_remote=True):
    """Relabel by ``ordering``, distribute by ``part`` and run one analytic.

    Returns ``(result, trace)`` with per-vertex results indexed by the
    input ids; colouring keys are input ids so layouts do not change
    estimates.
    """
    if ordering is not None:
        perm = ordering.perm
        g = apply_ordering(g, ordering)
        part = part.permuted(perm, g)
        keys = ordering.inverse()
    else:
        perm = np.arange(g.n)
        keys = np.arange(g.n)
    if not 0 <= root < g.n:
        raise DomainError(f"root {root} outside [0, {g.n})")
    dg = distribute(g, part, keys)
    if analytic == "pagerank":
        res, tr = pagerank(dg, iters)
    elif analytic == "bfs":
        res, tr = bfs(dg, int(perm[root]))
    elif analytic == "sssp":
        res, tr = sssp_delta(dg, int(perm[root]), delta, filter_remote)
    elif analytic == "count":
        est, tr = count_subgraphs(dg, template or path_template(3), iters, seed)
        return est, tr
    else:
        raise DomainError(f"unknown analytic {analytic!r}")
    return res[perm], tr


def _fmt_value(x) -> str:
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "inf" if math.isinf(x) else repr(x)
    return str(int(x))


def cmd_bench(args) -> int:
    g = _load(args)
    part, pname = _with_part(args, g)
    ordering, oname = _ordering(args, g, part)
    template = TemplateTree.load(args.template) if args.template else None
    result, trace = run_bench(g, part, ordering, args.analytic, iters=args.iters, delta=args.delta,
                              root=args.root, template=template, seed=args.seed,
                              filter_remote=not args.no_filter)
    run_id = f"{_stem(args.input)}-{args.analytic}-p{part.p}-{pname}-{oname}-s{args.seed}"
    texts = trace_report({run_id: trace}, args.out, prefix="bench")
    with open(_path(args, "bench_result.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if args.analytic == "count":
            w.writerow(("run_id", "estimate"))
            w.writerow((run_id, _fmt_value(result)))
        else:
            w.writerow(("vertex", args.analytic))
            w.writerows((v, _fmt_value(x)) for v, x in enumerate(result.tolist()))
    if args.figures:
        from .plotting import plot_timeline

        plot_timeline(trace, _path(args, "bench_timeline.png"), title=run_id)
    sys.stdout.write(texts["summary"])
    return EXIT_OK


def cmd_replication(args) -> int:
    g = _load(args)
    part, pname = _partition(args, g)
    stem = _stem(args.input)
    rows = [(stem, pname, part.p, h, repr(replication_ratio(g, part, h))) for h in args.hops]
    path = _path(args, f"{stem}.replication.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("graph", "partitioner", "p", "hops", "replication"))
        w.writerows(rows)
    with open(path) as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate, "preprocess": cmd_preprocess, "partition": cmd_partition, "order": cmd_order,
    "metrics": cmd_metrics, "bench": cmd_bench, "replication": cmd_replication,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command](args)
    except (GraphFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
