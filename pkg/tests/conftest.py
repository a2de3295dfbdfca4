"""Shared fixtures and independent oracles.

The brute-force helpers deliberately avoid the library's search code:
distances come from exhaustive simple-path enumeration, so they can act
as oracles for everything heap-based.
"""

from __future__ import annotations

import random

import pytest

from routelab.family import FamilyParams, build_family, build_tree_graph
from routelab.graph import Graph


def brute_distance(g: Graph, s: int, t: int):
    """Exhaustive DFS over simple paths; None when unreachable."""
    best = None

    def walk(v, used, acc):
        nonlocal best
        if best is not None and acc > best:
            return
        if v == t:
            best = acc if best is None else min(best, acc)
            return
        for u, w, _ in g.adjacency[v]:
            if u not in used:
                walk(u, used | {u}, acc + w)

    walk(s, {s}, 0)
    return best


def brute_shortest_paths(g: Graph, s: int, t: int):
    """All simple paths realizing the brute-force distance."""
    target = brute_distance(g, s, t)
    if target is None:
        return ()
    found = []

    def walk(v, used, acc, seq):
        if acc > target:
            return
        if v == t:
            if acc == target:
                found.append(tuple(seq))
            return
        for u, w, _ in g.adjacency[v]:
            if u not in used:
                seq.append(u)
                walk(u, used | {u}, acc + w, seq)
                seq.pop()

    walk(s, {s}, 0, [s])
    return tuple(sorted(found))


def random_graph(rng: random.Random, max_nodes: int = 12, edge_prob: float = 0.4,
                 max_weight: int = 20) -> Graph:
    n = rng.randint(2, max_nodes)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                edges.append((u, v, rng.randint(0, max_weight)))
    return Graph(n, edges)


@pytest.fixture(scope="session")
def p3() -> Graph:
    return Graph(3, [(0, 1, 1), (1, 2, 1)])


@pytest.fixture(scope="session")
def single_edge() -> Graph:
    return Graph(2, [(0, 1, 1)])


@pytest.fixture(scope="session")
def g22():
    return build_tree_graph(2, 2)


@pytest.fixture(scope="session")
def g222():
    return build_family(FamilyParams(2, 2, 2, 3))


@pytest.fixture(scope="session")
def g223():
    return build_family(FamilyParams(2, 2, 3, 3))


@pytest.fixture(scope="session")
def g232():
    return build_family(FamilyParams(2, 3, 2, 4))


@pytest.fixture(scope="session")
def g322():
    return build_family(FamilyParams(3, 2, 2, 3))
