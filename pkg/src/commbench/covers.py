"""Community covers, partitions, and merge dendrograms, plus their file forms.

A cover is an ordered list of node communities that may overlap. A partition
assigns every node to exactly one community (indices are normalized to a
dense 0..c-1 range, so two partitions with the same grouping compare equal).
A dendrogram is a merge forest over arbitrary leaf items; link clustering
uses graph edges as the leaves. The writers emit a canonical ordering -
communities sorted by size then by their sorted member-label list - so
detector output is byte-stable run to run.
"""

from __future__ import annotations

from .errors import DataError


class Partition:
    """Node-to-community assignment with dense community indices."""

    __slots__ = ("assignment", "n_communities")

    def __init__(self, assignment):
        remap = {}
        dense = []
        for a in assignment:
            if a not in remap:
                remap[a] = len(remap)
            dense.append(remap[a])
        self.assignment = tuple(dense)
        self.n_communities = len(remap)

    @property
    def n(self):
        return len(self.assignment)

    def communities(self):
        """Member lists per community, in community-index order."""
        out = [[] for _ in range(self.n_communities)]
        for v, a in enumerate(self.assignment):
            out[a].append(v)
        return out

    def sizes(self):
        counts = [0] * self.n_communities
        for a in self.assignment:
            counts[a] += 1
        return counts

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.assignment == other.assignment

    def __repr__(self):
        return f"Partition(n={self.n}, communities={self.n_communities})"


class Cover:
    """Overlapping community list over a fixed node universe 0..n-1.

    Communities are non-empty frozensets; exact duplicates are rejected at
    construction (producers de-duplicate first). The provenance tag records
    which detector/parameters produced the cover.
    """

    __slots__ = ("n", "communities", "provenance")

    def __init__(self, n, communities, provenance=""):
        self.n = int(n)
        if self.n <= 0:
            raise DataError("cover universe must contain at least one node")
        comms = []
        seen = set()
        for c in communities:
            fs = frozenset(c)
            if not fs:
                raise DataError("cover contains an empty community")
            for v in fs:
                if not (0 <= v < self.n):
                    raise DataError(
                        f"community member {v} outside universe 0..{self.n - 1}"
                    )
            if fs in seen:
                raise DataError("cover contains exact-duplicate communities")
            seen.add(fs)
            comms.append(fs)
        self.communities = comms
        self.provenance = provenance

    def __len__(self):
        return len(self.communities)

    def __iter__(self):
        return iter(self.communities)

    def __repr__(self):
        return f"Cover(n={self.n}, communities={len(self.communities)}, provenance={self.provenance!r})"


def dedupe_exact(communities):
    """Drop exact-duplicate node sets, keeping first occurrences in order."""
    seen = set()
    out = []
    for c in communities:
        fs = frozenset(c)
        if fs not in seen:
            seen.add(fs)
            out.append(fs)
    return out


class Dendrogram:
    """Merge forest over leaves 0..L-1; merge i creates node id L+i.

    Each merge is ``(child_a, child_b, height)`` with heights in [0, 1] and
    non-decreasing along every root path. Children may be leaves or earlier
    merges; every id is consumed at most once, so the structure is a forest.
    """

    __slots__ = ("leaves", "merges", "_heights")

    def __init__(self, leaves, merges):
        self.leaves = list(leaves)
        self.merges = list(merges)
        nleaf = len(self.leaves)
        heights = [0.0] * nleaf
        used = set()
        for k, (a, b, h) in enumerate(self.merges):
            node_id = nleaf + k
            if not 0.0 <= h <= 1.0:
                raise DataError(f"merge height {h} outside [0, 1]")
            for child in (a, b):
                if not (0 <= child < node_id):
                    raise DataError(f"merge {k} references unknown node {child}")
                if child in used:
                    raise DataError(f"node {child} merged twice")
                used.add(child)
                if h + 1e-12 < heights[child]:
                    raise DataError("merge heights decrease along a root path")
            heights.append(h)
        self._heights = heights

    def height_of(self, node_id):
        return self._heights[node_id]

    def cut(self, height):
        """Leaf clusters after applying every merge at or below the cut.

        Returns lists of leaf indices, ordered by each cluster's smallest
        leaf. Unmerged leaves come back as singleton clusters.
        """
        nleaf = len(self.leaves)
        comp = {i: [i] for i in range(nleaf)}
        for k, (a, b, h) in enumerate(self.merges):
            if h <= height:
                # children below this height were necessarily applied already
                merged = comp.pop(a) + comp.pop(b)
                comp[nleaf + k] = merged
        clusters = sorted(comp.values(), key=min)
        return [sorted(c) for c in clusters]


def _cover_lines(cover, graph):
    keyed = []
    for fs in cover.communities:
        members = sorted(graph.labels[v] for v in fs)
        keyed.append((len(fs), members))
    keyed.sort(key=lambda kv: (kv[0], kv[1]))
    return [" ".join(members) for _, members in keyed]


def serialize_cover(cover, graph):
    """Canonical text form: one community per line, labels space-separated."""
    lines = _cover_lines(cover, graph)
    return "\n".join(lines) + ("\n" if lines else "")


def write_cover(cover, graph, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_cover(cover, graph))


def write_partition(partition, graph, path):
    """Write 'label community-index' lines in node-index order."""
    if partition.n != graph.n:
        raise DataError("partition does not match graph node count")
    with open(path, "w", encoding="utf-8") as fh:
        for v, a in enumerate(partition.assignment):
            fh.write(f"{graph.labels[v]} {a}\n")


def read_partition(path, graph):
    assignment = [None] * graph.n
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'label community'")
            try:
                i = graph.index_of(parts[0])
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            try:
                assignment[i] = int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad community index {parts[1]!r}") from None
    if any(a is None for a in assignment):
        missing = next(v for v, a in enumerate(assignment) if a is None)
        raise DataError(f"{path}: no community for node {graph.labels[missing]!r}")
    return Partition(assignment)


def write_dendrogram(dendrogram, graph, path):
    """Write merges as 'child child height'; the leaf legend rides in comments."""
    with open(path, "w", encoding="utf-8") as fh:
        for k, (i, j) in enumerate(dendrogram.leaves):
            fh.write(f"# leaf {k} {graph.labels[i]} {graph.labels[j]}\n")
        for a, b, h in dendrogram.merges:
            fh.write(f"{a} {b} {h!r}\n")
