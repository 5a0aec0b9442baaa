"""End-to-end benchmark: detect communities, infer held-out attributes, report.

A run is a grid of cells (network x method x attribute). Each cell turns a
method's cover into binary membership features and scores a boosted-tree
classifier with stratified cross-validation on one attribute. Failures are
isolated per cell and logged, never fatal - unless every cell fails. Each
cell's fold rows are written atomically to a file of their own, so an
interrupted run resumes by skipping completed cells (unless forced); covers
and cover statistics are persisted per (network, method) the same way. The
final report is a deterministic fold over the cell rows, so a finished
output directory is byte-for-byte reproducible from the same config.

Cells are independent jobs; the `jobs` setting sizes a thread pool that
evaluates a method's attribute cells concurrently (graphs, covers, and
feature matrices are immutable and shared). Results are collected in
configuration order regardless of completion order.
"""

from __future__ import annotations

import csv
import logging
import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from urllib.parse import quote

from .coverops import (
    assignment_matrix,
    cover_stats,
    dedup,
    combine_runs,
    format_cover_stats,
    nmi,
    parse_cover_stats,
)
from .covers import Cover, Partition, serialize_cover
from .dataset import build_dataset, cross_validate
from .detectors import (
    ResolutionParams,
    cut_link_dendrogram,
    detect_cover,
    import_cover,
    link_clustering,
)
from .errors import AllCellsFailedError, CommbenchError, ConfigError, DataError
from .gbdt import GBDTParams, seed_entropy
from .graph import load_attributes, load_edge_list
from .planted import generate_planted

import numpy as np

log = logging.getLogger(__name__)

CONFIG_VERSION = "version 1"

LOUVAIN_GRID = tuple(i / 10 for i in range(1, 11))
GCE_GRID = (0.8, 1.0, 1.3, 1.5, 1.7, 2.2)
LINK_GRID = tuple(range(1, 101))

METHOD_KINDS = (
    "louvain",
    "gce",
    "linkcluster",
    "import",
    "louvain-sweep",
    "gce-sweep",
    "linkcluster-sweep",
)


@dataclass
class MethodSpec:
    name: str
    kind: str
    opts: dict = field(default_factory=dict)


@dataclass
class BenchmarkConfig:
    datasets: list  # (name, edge_path, attribute_path)
    methods: list  # MethodSpec
    attributes: list
    classifier: GBDTParams = GBDTParams()
    k: int = 10
    folds_evaluated: int = 3
    output_dir: str = "bench-out"
    seed: int = 0
    jobs: int = 1


def _parse_bool(raw, where):
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ConfigError(f"{where}: expected true/false, got {raw!r}")


def _parse_grid_floats(raw, where):
    try:
        values = tuple(float(x) for x in raw.split(","))
    except ValueError:
        raise ConfigError(f"{where}: bad float list {raw!r}") from None
    if not values:
        raise ConfigError(f"{where}: empty grid")
    return values


def _parse_grid_ints(raw, where):
    # accepts "lo-hi" ranges or comma lists
    if "-" in raw and "," not in raw:
        lo, _, hi = raw.partition("-")
        try:
            values = tuple(range(int(lo), int(hi) + 1))
        except ValueError:
            raise ConfigError(f"{where}: bad range {raw!r}") from None
    else:
        try:
            values = tuple(int(x) for x in raw.split(","))
        except ValueError:
            raise ConfigError(f"{where}: bad integer list {raw!r}") from None
    if not values:
        raise ConfigError(f"{where}: empty grid")
    return values


def _parse_method(kind, name, pairs, where):
    if kind not in METHOD_KINDS:
        raise ConfigError(f"{where}: unknown method kind {kind!r}")
    raw = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"{where}: expected key=value, got {pair!r}")
        raw[key] = value
    opts = {"dedup": _parse_bool(raw.pop("dedup", "false"), where)}
    try:
        if kind == "louvain":
            opts["t"] = float(raw.pop("t", "1.0"))
            opts["multi_level"] = _parse_bool(raw.pop("multi_level", "false"), where)
        elif kind == "gce":
            opts["alpha"] = float(raw.pop("alpha", "1.5"))
        elif kind == "linkcluster":
            opts["threshold"] = int(raw.pop("threshold", "50"))
        elif kind == "louvain-sweep":
            ts = raw.pop("ts", None)
            opts["ts"] = _parse_grid_floats(ts, where) if ts else LOUVAIN_GRID
            opts["multi_level"] = _parse_bool(raw.pop("multi_level", "false"), where)
        elif kind == "gce-sweep":
            alphas = raw.pop("alphas", None)
            opts["alphas"] = _parse_grid_floats(alphas, where) if alphas else GCE_GRID
        elif kind == "linkcluster-sweep":
            thresholds = raw.pop("thresholds", None)
            opts["thresholds"] = (
                _parse_grid_ints(thresholds, where) if thresholds else LINK_GRID
            )
        elif kind == "import":
            opts["path"] = raw.pop("path")
    except KeyError as exc:
        raise ConfigError(f"{where}: method {name!r} is missing {exc.args[0]}") from None
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    if raw:
        extras = ", ".join(sorted(raw))
        raise ConfigError(f"{where}: unknown method options: {extras}")
    return MethodSpec(name=name, kind=kind, opts=opts)


def parse_config(path):
    """Parse the versioned key-value benchmark configuration file."""
    datasets = []
    methods = []
    attributes = []
    scalars = {
        "seed": 0,
        "output": "bench-out",
        "k": 10,
        "folds-evaluated": 3,
        "jobs": 1,
        "trees": 1000,
        "learning-rate": 0.005,
        "min-samples-split": 5,
        "subsample": 0.4,
        "max-depth": 3,
    }
    casts = {
        "seed": int,
        "output": str,
        "k": int,
        "folds-evaluated": int,
        "jobs": int,
        "trees": int,
        "learning-rate": float,
        "min-samples-split": int,
        "subsample": float,
        "max-depth": int,
    }
    version_seen = False
    with open(path, encoding="utf-8") as fh:
        for lineno, rawline in enumerate(fh, start=1):
            line = rawline.strip()
            if not line or line.startswith("#"):
                continue
            where = f"{path}:{lineno}"
            parts = line.split()
            if not version_seen:
                if parts != CONFIG_VERSION.split():
                    raise ConfigError(f"{where}: first directive must be '{CONFIG_VERSION}'")
                version_seen = True
                continue
            key = parts[0]
            if key == "dataset":
                if len(parts) != 4:
                    raise ConfigError(f"{where}: dataset needs name, edges, attributes")
                datasets.append((parts[1], parts[2], parts[3]))
            elif key == "attribute":
                if len(parts) != 2:
                    raise ConfigError(f"{where}: attribute needs exactly one name")
                attributes.append(parts[1])
            elif key == "method":
                if len(parts) < 3:
                    raise ConfigError(f"{where}: method needs a kind and a name")
                methods.append(_parse_method(parts[1], parts[2], parts[3:], where))
            elif key in scalars:
                if len(parts) != 2:
                    raise ConfigError(f"{where}: {key} takes exactly one value")
                try:
                    scalars[key] = casts[key](parts[1])
                except ValueError:
                    raise ConfigError(f"{where}: bad value for {key}: {parts[1]!r}") from None
            else:
                raise ConfigError(f"{where}: unknown directive {key!r}")
    if not version_seen:
        raise ConfigError(f"{path}: empty configuration (missing '{CONFIG_VERSION}')")
    if not datasets:
        raise ConfigError(f"{path}: at least one dataset is required")
    if not methods:
        raise ConfigError(f"{path}: at least one method is required")
    if not attributes:
        raise ConfigError(f"{path}: at least one attribute is required")
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: method names must be unique")
    if len({d[0] for d in datasets}) != len(datasets):
        raise ConfigError(f"{path}: dataset names must be unique")
    if scalars["k"] < 2:
        raise ConfigError(f"{path}: k must be at least 2")
    if not 1 <= scalars["folds-evaluated"] <= scalars["k"]:
        raise ConfigError(f"{path}: folds-evaluated must be between 1 and k")
    if scalars["jobs"] < 1:
        raise ConfigError(f"{path}: jobs must be at least 1")
    classifier = GBDTParams(
        learning_rate=scalars["learning-rate"],
        n_trees=scalars["trees"],
        min_samples_split=scalars["min-samples-split"],
        subsample=scalars["subsample"],
        max_depth=scalars["max-depth"],
        seed=scalars["seed"],
    )
    try:
        classifier.validate()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return BenchmarkConfig(
        datasets=datasets,
        methods=methods,
        attributes=attributes,
        classifier=classifier,
        k=scalars["k"],
        folds_evaluated=scalars["folds-evaluated"],
        output_dir=scalars["output"],
        seed=scalars["seed"],
        jobs=scalars["jobs"],
    )


def method_cover(graph, method, seed):
    """Resolve one method entry to a cover (single run, import, or sweep)."""
    opts = method.opts
    kind = method.kind
    if kind == "louvain":
        cover = detect_cover(
            graph,
            "louvain",
            ResolutionParams(markov_time=opts["t"], seed=seed),
            multi_level=opts["multi_level"],
        )
    elif kind == "gce":
        cover = detect_cover(graph, "gce", ResolutionParams(alpha=opts["alpha"], seed=seed))
    elif kind == "linkcluster":
        cover = detect_cover(
            graph,
            "linkcluster",
            ResolutionParams(threshold_percent=opts["threshold"], seed=seed),
        )
    elif kind == "import":
        cover = import_cover(opts["path"], graph)
    elif kind == "louvain-sweep":
        covers = [
            detect_cover(
                graph,
                "louvain",
                ResolutionParams(markov_time=t, seed=seed),
                multi_level=opts["multi_level"],
            )
            for t in opts["ts"]
        ]
        cover = combine_runs(covers)
    elif kind == "gce-sweep":
        covers = [
            detect_cover(graph, "gce", ResolutionParams(alpha=a, seed=seed))
            for a in opts["alphas"]
        ]
        cover = combine_runs(covers)
    elif kind == "linkcluster-sweep":
        dendrogram = link_clustering(graph)
        covers = [
            cut_link_dendrogram(dendrogram, threshold, graph)
            for threshold in opts["thresholds"]
        ]
        cover = combine_runs(covers)
    else:
        raise ConfigError(f"unknown method kind {kind!r}")
    if opts.get("dedup"):
        cover = dedup(cover)
    return cover


def _canonical_cover(cover, graph, name):
    """Stable community order (size, member labels) shared with the file form."""
    ordered = sorted(
        cover.communities,
        key=lambda fs: (len(fs), sorted(graph.labels[v] for v in fs)),
    )
    return Cover(cover.n, ordered, provenance=name)


def cell_seed(seed, network, method, attribute):
    """Stable per-cell classifier seed."""
    entropy = seed_entropy(
        seed,
        zlib.crc32(network.encode("utf-8")),
        zlib.crc32(method.encode("utf-8")),
        zlib.crc32(attribute.encode("utf-8")),
    )
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _safe(name):
    return quote(name, safe="")


def _cell_path(out, network, method, attribute):
    return out / "cells" / f"{_safe(network)}__{_safe(method)}__{_safe(attribute)}.csv"


def _stats_path(out, network, method):
    return out / "stats" / f"{_safe(network)}__{_safe(method)}.tsv"


def _cover_path(out, network, method):
    return out / "covers" / f"{_safe(network)}__{_safe(method)}.txt"


def _atomic_write(path, text):
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_cell(path, rows):
    lines = []
    for network, method, attribute, fold, accuracy in rows:
        lines.append(
            ",".join(_csv_quote(x) for x in (network, method, attribute))
            + f",{fold},{accuracy!r}"
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def _csv_quote(value):
    if any(ch in value for ch in ',"\n'):
        return '"' + value.replace('"', '""') + '"'
    return value


def _read_cell(path):
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for record in csv.reader(fh):
            if not record:
                continue
            if len(record) != 5:
                raise DataError(f"{path}: bad cell row {record!r}")
            rows.append(
                (record[0], record[1], record[2], int(record[3]), float(record[4]))
            )
    return rows


@dataclass
class BenchmarkReport:
    records: list  # (network, method, attribute, fold, accuracy), sorted
    stats: dict  # (network, method) -> CoverStats
    summary: dict  # (method, attribute) -> (mean accuracy, record count)
    histograms: dict  # (method, attribute) -> {percent bin: count}
    failures: list  # (network, method, attribute, message)


def accuracy_histogram(accuracies):
    """Counts per integer percent bin, round-half-up into 0..100."""
    bins = {}
    for a in accuracies:
        b = int(math.floor(a * 100.0 + 0.5))
        b = min(100, max(0, b))
        bins[b] = bins.get(b, 0) + 1
    return dict(sorted(bins.items()))


def run_benchmark(config, force=False):
    """Evaluate the full cell grid; returns the report after writing it out."""
    out = Path(config.output_dir)
    for sub in ("cells", "stats", "covers", "hist"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    total_cells = len(config.datasets) * len(config.methods) * len(config.attributes)
    records = []
    failures = []
    stats = {}
    loaded = {}

    def get_data(name, edge_path, attr_path):
        if name not in loaded:
            graph = load_edge_list(edge_path)
            loaded[name] = (graph, load_attributes(attr_path, graph))
        return loaded[name]

    for net_name, edge_path, attr_path in config.datasets:
        for method in config.methods:
            done = {}
            missing = []
            for attribute in config.attributes:
                path = _cell_path(out, net_name, method.name, attribute)
                if path.exists() and not force:
                    done[attribute] = _read_cell(path)
                else:
                    missing.append(attribute)
            stats_path = _stats_path(out, net_name, method.name)
            have_stats = stats_path.exists() and not force
            if have_stats:
                with open(stats_path, encoding="utf-8") as fh:
                    stats[(net_name, method.name)] = parse_cover_stats(fh.readline())
            for attribute in config.attributes:
                if attribute in done:
                    records.extend(done[attribute])
            if not missing and have_stats:
                continue
            try:
                graph, table = get_data(net_name, edge_path, attr_path)
            except (CommbenchError, OSError, ValueError) as exc:
                log.error("dataset %s failed: %s", net_name, exc)
                for attribute in missing:
                    failures.append((net_name, method.name, attribute, f"dataset: {exc}"))
                continue
            cover_path = _cover_path(out, net_name, method.name)
            try:
                if cover_path.exists() and not force:
                    cover = import_cover(cover_path, graph)
                else:
                    cover = method_cover(graph, method, config.seed)
                cover = _canonical_cover(cover, graph, method.name)
            except (CommbenchError, OSError, ValueError) as exc:
                log.error("method %s on %s failed: %s", method.name, net_name, exc)
                for attribute in missing:
                    failures.append((net_name, method.name, attribute, f"detect: {exc}"))
                continue
            _atomic_write(
                cover_path,
                f"# cover {method.name} on {net_name}\n" + serialize_cover(cover, graph),
            )
            st = cover_stats(cover, graph.n)
            stats[(net_name, method.name)] = st
            _atomic_write(stats_path, format_cover_stats(st) + "\n")
            matrix = assignment_matrix(cover, graph.n)

            def evaluate(attribute):
                data = build_dataset(matrix, table, attribute)
                params = replace(
                    config.classifier,
                    seed=cell_seed(config.seed, net_name, method.name, attribute),
                )
                accuracies = cross_validate(
                    data, params, k=config.k, folds_evaluated=config.folds_evaluated
                )
                return [
                    (net_name, method.name, attribute, fold, acc)
                    for fold, acc in enumerate(accuracies)
                ]

            results = {}
            if config.jobs > 1 and len(missing) > 1:
                with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                    futures = {a: pool.submit(evaluate, a) for a in missing}
                for attribute in missing:
                    try:
                        results[attribute] = futures[attribute].result()
                    except (CommbenchError, ValueError) as exc:
                        results[attribute] = exc
            else:
                for attribute in missing:
                    try:
                        results[attribute] = evaluate(attribute)
                    except (CommbenchError, ValueError) as exc:
                        results[attribute] = exc
            for attribute in missing:
                outcome = results[attribute]
                if isinstance(outcome, Exception):
                    log.error(
                        "cell (%s, %s, %s) failed: %s",
                        net_name,
                        method.name,
                        attribute,
                        outcome,
                    )
                    failures.append(
                        (net_name, method.name, attribute, f"classify: {outcome}")
                    )
                    continue
                _write_cell(_cell_path(out, net_name, method.name, attribute), outcome)
                records.extend(outcome)

    if failures and len(failures) >= total_cells:
        raise AllCellsFailedError(f"all {total_cells} benchmark cells failed")
    records.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    expected = config.folds_evaluated * (total_cells - len(failures))
    if len(records) != expected:
        raise CommbenchError(
            f"record count {len(records)} does not match expected {expected}"
        )
    summary = {}
    histograms = {}
    by_pair = {}
    for network, method, attribute, fold, accuracy in records:
        by_pair.setdefault((method, attribute), []).append(accuracy)
    for pair, accs in sorted(by_pair.items()):
        summary[pair] = (sum(accs) / len(accs), len(accs))
        histograms[pair] = accuracy_histogram(accs)
    _write_report(out, config, records, stats, summary, histograms, failures)
    return BenchmarkReport(records, stats, summary, histograms, failures)


def _write_report(out, config, records, stats, summary, histograms, failures):
    lines = ["network,method,attribute,fold,accuracy"]
    for network, method, attribute, fold, accuracy in records:
        lines.append(
            ",".join(_csv_quote(x) for x in (network, method, attribute))
            + f",{fold},{accuracy!r}"
        )
    _atomic_write(out / "report.csv", "\n".join(lines) + "\n")
    lines = ["method\tattribute\tmean_accuracy\trecords"]
    for (method, attribute), (mean, count) in sorted(summary.items()):
        lines.append(f"{method}\t{attribute}\t{mean!r}\t{count}")
    _atomic_write(out / "summary.tsv", "\n".join(lines) + "\n")
    lines = ["network\tmethod\tcommunities\tmedian_smallest\tuncovered\tsizes"]
    for (network, method), st in sorted(stats.items()):
        lines.append(f"{network}\t{method}\t{format_cover_stats(st)}")
    _atomic_write(out / "stats.tsv", "\n".join(lines) + "\n")
    for (method, attribute), bins in sorted(histograms.items()):
        body = "\n".join(f"{b} {c}" for b, c in bins.items())
        _atomic_write(
            out / "hist" / f"{_safe(method)}__{_safe(attribute)}.txt",
            body + ("\n" if body else ""),
        )
    lines = []
    for network, method, attribute, message in failures:
        clean = " ".join(str(message).split())
        lines.append(f"{network}\t{method}\t{attribute}\t{clean}")
    _atomic_write(out / "failures.tsv", "\n".join(lines) + ("\n" if lines else ""))


def flatten_cover(cover):
    """Best-match flattening of a cover into a partition.

    Every node joins the largest community containing it (earliest in cover
    order on ties); nodes in no community become fresh singletons.
    """
    assign = [-1] * cover.n
    best_size = [0] * cover.n
    for idx, community in enumerate(cover.communities):
        size = len(community)
        for v in community:
            if size > best_size[v]:
                best_size[v] = size
                assign[v] = idx
    fresh = len(cover.communities)
    for v in range(cover.n):
        if assign[v] < 0:
            assign[v] = fresh
            fresh += 1
    return Partition(assign)


@dataclass
class SanityResult:
    nmi: float
    detected_communities: int
    planted_communities: int
    ratio: float


def sanity_check(method, params, spec, multi_level=False):
    """Detect on a planted graph and compare against the planted partition.

    The cover is flattened by best match before NMI; the count ratio
    detected/planted catches covers that shred the graph even when NMI looks
    acceptable. An empty cover is an error.
    """
    graph, truth, _ = generate_planted(spec)
    cover = detect_cover(graph, method, params, multi_level=multi_level)
    if not cover.communities:
        raise DataError("detector produced an empty cover")
    flattened = flatten_cover(cover)
    detected = len(cover.communities)
    return SanityResult(
        nmi=nmi(flattened, truth),
        detected_communities=detected,
        planted_communities=truth.n_communities,
        ratio=detected / truth.n_communities,
    )
