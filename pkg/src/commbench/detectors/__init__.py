"""Community detectors sharing one parameter bundle and one cover contract.

Every detector consumes a Graph and a ResolutionParams and produces a Cover
over the same node universe; identical inputs give byte-identical serialized
covers. Externally computed covers enter through import_cover and flow
through the same downstream operations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..covers import Cover
from ..errors import ConfigError, DataError
from .gce import gce, maximal_cliques
from .linkclust import cut_link_dendrogram, edge_similarity, link_clustering
from .louvain import LouvainResult, louvain, parameterized_modularity

log = logging.getLogger(__name__)

__all__ = [
    "ResolutionParams",
    "detect_cover",
    "import_cover",
    "louvain",
    "parameterized_modularity",
    "LouvainResult",
    "gce",
    "maximal_cliques",
    "link_clustering",
    "cut_link_dendrogram",
    "edge_similarity",
]


@dataclass(frozen=True)
class ResolutionParams:
    """Knobs shared by the detectors; each reads only its own field.

    markov_time drives Louvain's resolution, alpha the clique-expansion
    fitness, threshold_percent the link-dendrogram cut. The seed is carried
    into provenance and derived consumers; detection itself is deterministic
    by construction (fixed scan orders and tie-breaks).
    """

    markov_time: float = 1.0
    alpha: float = 1.5
    threshold_percent: int = 50
    seed: int = 0


def detect_cover(graph, method, params, multi_level=False):
    """Run one detector by name; returns its cover."""
    if method == "louvain":
        result = louvain(graph, params, multi_level=multi_level)
        if multi_level:
            return result.cover
        final = result.levels[-1]
        return Cover(
            graph.n,
            [frozenset(c) for c in final.communities()],
            provenance=f"louvain(t={params.markov_time:g})",
        )
    if method == "gce":
        return gce(graph, params)
    if method == "linkcluster":
        dendrogram = link_clustering(graph)
        return cut_link_dendrogram(dendrogram, params.threshold_percent, graph)
    raise ConfigError(f"unknown detector {method!r}")


def import_cover(path, graph):
    """Read an externally produced cover file.

    One community per line, node labels space-separated; '#' lines are
    comments. Unknown labels are errors, exact-duplicate lines are dropped
    with a warning. A file without any content line at all is an error; a
    file holding only comments imports as an empty cover (the explicit way
    to feed downstream stages a cover with zero communities).
    """
    communities = []
    seen = set()
    dropped = 0
    any_line = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            any_line = True
            if line.startswith("#"):
                continue
            members = set()
            for lab in line.split():
                try:
                    members.add(graph.index_of(lab))
                except DataError as exc:
                    raise DataError(f"{path}:{lineno}: {exc}") from None
            fs = frozenset(members)
            if fs in seen:
                dropped += 1
                continue
            seen.add(fs)
            communities.append(fs)
    if not any_line:
        raise DataError(f"{path}: empty cover file")
    if dropped:
        log.warning("%s: dropped %d exact-duplicate communities", path, dropped)
    if not communities:
        log.warning("%s: imported cover has zero communities", path)
    return Cover(graph.n, communities, provenance=f"import({path})")
