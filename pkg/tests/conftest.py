"""Shared fixtures: micro graphs, planted-fixture specs, random generators."""

import random
from itertools import combinations

import pytest

from commbench import Graph, PlantedPartitionSpec

# Acceptance results are gathered here so a terminal-summary hook can print
# one line per criterion even though pytest captures test stdout.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


BARBELL6_EDGES = [
    (0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
    (3, 4, 1.0), (3, 5, 1.0), (4, 5, 1.0),
    (2, 3, 1.0),
]

# name -> (n, edges, allow_self_loops); all verified exhaustively solvable
MICRO_GRAPHS = {
    "path4": (4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], False),
    "star5": (5, [(0, i, 1.0) for i in range(1, 5)], False),
    "cycle6": (6, [(i, (i + 1) % 6, 1.0) for i in range(6)], False),
    "k4": (4, [(i, j, 1.0) for i, j in combinations(range(4), 2)], False),
    "barbell6": (6, BARBELL6_EDGES, False),
    "wpath3": (3, [(0, 1, 2.0), (1, 2, 0.5)], False),
    "looptri": (3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (0, 0, 1.5)], True),
    "twotri": (6, BARBELL6_EDGES[:6], False),
    "kite7": (
        7,
        [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 3, 1.0),
         (3, 4, 1.0), (4, 5, 1.0), (4, 6, 1.0), (5, 6, 1.0)],
        False,
    ),
}


def make_micro(name):
    n, edges, loops = MICRO_GRAPHS[name]
    return Graph([str(i) for i in range(n)], edges, allow_self_loops=loops)


@pytest.fixture
def barbell6():
    return make_micro("barbell6")


def random_graph(rng, max_n=10, allow_self_loops=False, weighted=False):
    """Connectedness not required; at least one edge unless n == 1."""
    n = rng.randint(2, max_n)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                w = rng.choice([0.5, 1.0, 1.0, 2.5]) if weighted else 1.0
                edges.append((i, j, w))
        if allow_self_loops and rng.random() < 0.2:
            edges.append((i, i, rng.choice([0.5, 1.0]) if weighted else 1.0))
    if not edges:
        edges.append((0, 1, 1.0))
    return Graph([str(i) for i in range(n)], edges, allow_self_loops=allow_self_loops), edges


def random_partition(rng, n):
    k = rng.randint(1, n)
    assignment = [rng.randrange(k) for _ in range(n)]
    return assignment


def random_cover_communities(rng, n):
    count = rng.randint(1, 12)
    seen = set()
    out = []
    for _ in range(count):
        size = rng.randint(1, max(1, n // 2))
        fs = frozenset(rng.sample(range(n), size))
        if fs not in seen:
            seen.add(fs)
            out.append(fs)
    return out


# pinned planted fixtures (see the four-group/hierarchy acceptance criteria)
FOUR_GROUP = dict(n=128, groups=4, p_in=14 / 31, p_out=2 / 96)

HIERARCHY = PlantedPartitionSpec(
    n=32, groups=4, p_in=1.0, p_out=0.02, seed=50, hierarchy=True, p_mid=0.45
)

SCALE = PlantedPartitionSpec(n=10000, groups=50, p_in=0.07, p_out=0.0006, seed=7)


def four_group_spec(seed):
    return PlantedPartitionSpec(seed=seed, **FOUR_GROUP)


@pytest.fixture
def rng():
    return random.Random(20260816)
