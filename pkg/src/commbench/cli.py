"""Command-line front end.

Subcommands: detect, combine, bench, sanity, stats, order. Exit codes:
0 success, 1 usage or configuration error, 2 data error, 3 every benchmark
cell failed.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .bench import parse_config, run_benchmark, sanity_check
from .coverops import combine_runs, cover_stats, format_cover_stats
from .covers import serialize_cover, write_cover
from .detectors import ResolutionParams, detect_cover, import_cover
from .errors import AllCellsFailedError, CommbenchError, ConfigError
from .graph import load_attributes, load_edge_list
from .ordering import order_adjacency, write_ordering
from .planted import PlantedPartitionSpec


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_resolution_options(sub):
    sub.add_argument("--t", type=float, default=1.0, help="Markov time for louvain (default 1.0)")
    sub.add_argument("--alpha", type=float, default=1.5, help="fitness exponent for gce (default 1.5)")
    sub.add_argument(
        "--threshold",
        type=int,
        default=50,
        metavar="PCT",
        help="dendrogram cut percentage for linkcluster (default 50)",
    )
    sub.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def build_parser():
    parser = _Parser(prog="commbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = commands.add_parser("detect", parents=[], help="detect communities in an edge list")
    p.add_argument("graph", help="edge list file")
    p.add_argument("--method", required=True, choices=["louvain", "gce", "linkcluster"])
    _add_resolution_options(p)
    p.add_argument("--multi-level", action="store_true", help="louvain: keep every aggregation level")
    p.add_argument("--allow-self-loops", action="store_true")
    p.add_argument("--out", help="cover file to write (default stdout)")
    p.set_defaults(func=cmd_detect)

    p = commands.add_parser("combine", help="pool cover files and drop near-duplicates")
    p.add_argument("graph", help="edge list file the covers refer to")
    p.add_argument("covers", nargs="+", help="cover files")
    p.add_argument("--out", help="cover file to write (default stdout)")
    p.set_defaults(func=cmd_combine)

    p = commands.add_parser("bench", help="run a benchmark configuration")
    p.add_argument("config", help="benchmark configuration file")
    p.add_argument("--force", action="store_true", help="recompute completed cells")
    p.set_defaults(func=cmd_bench)

    p = commands.add_parser("sanity", help="score a detector on a planted-partition graph")
    p.add_argument("--method", required=True, choices=["louvain", "gce", "linkcluster"])
    _add_resolution_options(p)
    p.add_argument("--multi-level", action="store_true")
    p.add_argument("--nodes", type=int, default=128)
    p.add_argument("--groups", type=int, default=4)
    p.add_argument("--p-in", type=float, default=14 / 31)
    p.add_argument("--p-out", type=float, default=2 / 96)
    p.add_argument("--hierarchy", action="store_true", help="pair consecutive groups into super-groups")
    p.add_argument("--p-mid", type=float, default=None, help="edge probability inside a super-group")
    p.set_defaults(func=cmd_sanity)

    p = commands.add_parser("stats", help="summarize a cover file")
    p.add_argument("graph", help="edge list file")
    p.add_argument("cover", help="cover file")
    p.set_defaults(func=cmd_stats)

    p = commands.add_parser("order", help="block-wise node ordering for matrix plots")
    p.add_argument("graph", help="edge list file")
    p.add_argument("attributes", help="attribute table file")
    p.add_argument("--attribute", required=True, help="blocking attribute name")
    p.add_argument("--t", type=float, default=1.0, help="Markov time for the orderings (default 1.0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="ordering", help="output prefix (default 'ordering')")
    p.set_defaults(func=cmd_order)

    return parser


def cmd_detect(args):
    graph = load_edge_list(args.graph, allow_self_loops=args.allow_self_loops)
    params = ResolutionParams(
        markov_time=args.t,
        alpha=args.alpha,
        threshold_percent=args.threshold,
        seed=args.seed,
    )
    cover = detect_cover(graph, args.method, params, multi_level=args.multi_level)
    if args.out:
        write_cover(cover, graph, args.out)
    else:
        sys.stdout.write(serialize_cover(cover, graph))
    return 0


def cmd_combine(args):
    graph = load_edge_list(args.graph)
    covers = [import_cover(path, graph) for path in args.covers]
    merged = combine_runs(covers)
    if args.out:
        write_cover(merged, graph, args.out)
    else:
        sys.stdout.write(serialize_cover(merged, graph))
    return 0


def cmd_bench(args):
    config = parse_config(args.config)
    report = run_benchmark(config, force=args.force)
    print("method\tattribute\tmean_accuracy\trecords")
    for (method, attribute), (mean, count) in sorted(report.summary.items()):
        print(f"{method}\t{attribute}\t{mean!r}\t{count}")
    if report.failures:
        print(f"{len(report.failures)} cell(s) failed; see failures.tsv", file=sys.stderr)
    print(f"report written to {config.output_dir}", file=sys.stderr)
    return 0


def cmd_sanity(args):
    spec = PlantedPartitionSpec(
        n=args.nodes,
        groups=args.groups,
        p_in=args.p_in,
        p_out=args.p_out,
        seed=args.seed,
        hierarchy=args.hierarchy,
        p_mid=args.p_mid,
    )
    params = ResolutionParams(
        markov_time=args.t,
        alpha=args.alpha,
        threshold_percent=args.threshold,
        seed=args.seed,
    )
    result = sanity_check(args.method, params, spec, multi_level=args.multi_level)
    print(f"nmi {result.nmi!r}")
    print(f"detected {result.detected_communities}")
    print(f"planted {result.planted_communities}")
    print(f"ratio {result.ratio!r}")
    return 0


def cmd_stats(args):
    graph = load_edge_list(args.graph)
    cover = import_cover(args.cover, graph)
    print("communities\tmedian_smallest\tuncovered\tsizes")
    print(format_cover_stats(cover_stats(cover, graph.n)))
    return 0


def cmd_order(args):
    graph = load_edge_list(args.graph)
    attrs = load_attributes(args.attributes, graph)
    params = ResolutionParams(markov_time=args.t, seed=args.seed)
    ordering = order_adjacency(graph, attrs, args.attribute, params)
    order_path = f"{args.out}.order"
    ranges_path = f"{args.out}.ranges"
    write_ordering(ordering, graph, order_path, ranges_path)
    print(f"wrote {order_path} and {ranges_path}", file=sys.stderr)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except AllCellsFailedError as exc:
        print(f"commbench: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"commbench: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"commbench: {exc}", file=sys.stderr)
        return 1
    except CommbenchError as exc:
        print(f"commbench: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"commbench: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
