"""Exact weighted-graph core: representation, Dijkstra oracles, perturbation.

All edge lengths are non-negative integers and all arithmetic is exact.
Lengths are semantically unsigned 64-bit values; the range is enforced
explicitly (Python ints never wrap, so the check is the whole contract).
Unreachable distances are represented by ``None``, never by a sentinel
number that could accidentally take part in arithmetic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import CapExceeded, InvariantViolation, LengthOverflow

MAX_LENGTH = 2**64 - 1


@dataclass(frozen=True)
class PathResult:
    """A single source/target query answer.

    ``vertices`` is empty iff the pair is unreachable (distance ``None``)
    and is the single vertex ``(source,)`` iff source == target.
    """

    source: int
    target: int
    distance: int | None
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class SearchStats:
    settled: int
    relaxed: int


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    max_degree: int
    diameter: int


class Graph:
    """Immutable weighted graph with identity-indexed nodes.

    Edges are stored once as ``(u, v, w)`` triples; the edge id is the
    position in that sequence.  For undirected graphs the adjacency lists
    carry each edge in both endpoint lists with equal length.
    """

    __slots__ = ("node_count", "directed", "edges", "adjacency", "_in_adj")

    def __init__(self, node_count: int, edges, directed: bool = False):
        if node_count < 0:
            raise InvariantViolation("node_count must be non-negative")
        edges = tuple((int(u), int(v), int(w)) for u, v, w in edges)
        adjacency = [[] for _ in range(node_count)]
        for eid, (u, v, w) in enumerate(edges):
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise InvariantViolation(f"edge {eid}: endpoint out of range")
            if u == v:
                raise InvariantViolation(f"edge {eid}: self-loop at node {u}")
            if w < 0:
                raise InvariantViolation(f"edge {eid}: negative length")
            if w > MAX_LENGTH:
                raise LengthOverflow(f"edge {eid}: length exceeds 64-bit range")
            adjacency[u].append((v, w, eid))
            if not directed:
                adjacency[v].append((u, w, eid))
        self.node_count = node_count
        self.directed = bool(directed)
        self.edges = edges
        self.adjacency = tuple(tuple(lst) for lst in adjacency)
        self._in_adj = None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def in_adjacency(self):
        """Incoming adjacency; equals ``adjacency`` for undirected graphs."""
        if not self.directed:
            return self.adjacency
        if self._in_adj is None:
            in_adj = [[] for _ in range(self.node_count)]
            for eid, (u, v, w) in enumerate(self.edges):
                in_adj[v].append((u, w, eid))
            self._in_adj = tuple(tuple(lst) for lst in in_adj)
        return self._in_adj

    def _check_node(self, v: int):
        if not (0 <= v < self.node_count):
            raise InvariantViolation(f"node id {v} out of range")


def _distances(g: Graph, s: int):
    """Plain Dijkstra distance pass; returns a list with None = unreachable."""
    adj = g.adjacency
    dist: list[int | None] = [None] * g.node_count
    dist[s] = 0
    heap = [(0, s)]
    while heap:
        d, v = heapq.heappop(heap)
        if d != dist[v]:
            continue
        for u, w, _ in adj[v]:
            nd = d + w
            if dist[u] is None or nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def dijkstra(g: Graph, s: int):
    """Exact distances plus the canonical shortest-path tree from ``s``.

    The parent of every reached node is the smallest-id predecessor that
    was settled earlier and lies on a shortest path, which makes the tree
    unique and reproducible (ties between equal-length paths always
    resolve the same way, including across zero-length edges).
    """
    g._check_node(s)
    dist: list[int | None] = [None] * g.node_count
    settle_idx = [0] * g.node_count
    dist[s] = 0
    heap = [(0, s)]
    order = 0
    while heap:
        d, v = heapq.heappop(heap)
        if d != dist[v] or settle_idx[v]:
            continue
        order += 1
        settle_idx[v] = order
        for u, w, _ in g.adjacency[v]:
            nd = d + w
            if dist[u] is None or nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    parent: list[int | None] = [None] * g.node_count
    in_adj = g.in_adjacency()
    for v in range(g.node_count):
        if v == s or dist[v] is None:
            continue
        best = None
        for u, w, _ in in_adj[v]:
            if dist[u] is not None and dist[u] + w == dist[v] and settle_idx[u] < settle_idx[v]:
                if best is None or u < best:
                    best = u
        parent[v] = best
    return dist, parent


def tree_path(parent, s: int, t: int) -> tuple[int, ...]:
    """Vertex sequence s..t read off a parent table from dijkstra()."""
    seq = [t]
    while seq[-1] != s:
        p = parent[seq[-1]]
        if p is None:
            return ()
        seq.append(p)
    seq.reverse()
    return tuple(seq)


def bidirectional_dijkstra(g: Graph, s: int, t: int):
    """Bidirectional search; returns (PathResult, SearchStats).

    The distance always equals the one-sided Dijkstra distance; settled
    and relaxed counts cover both directions.
    """
    g._check_node(s)
    g._check_node(t)
    if s == t:
        return PathResult(s, t, 0, (s,)), SearchStats(settled=1, relaxed=0)
    adjs = (g.adjacency, g.in_adjacency())
    dist = ({s: 0}, {t: 0})
    parent: tuple[dict, dict] = ({s: None}, {t: None})
    settled = (set(), set())
    heaps = ([(0, s)], [(0, t)])
    best: int | None = None
    meet: int | None = None
    n_settled = 0
    n_relaxed = 0
    while heaps[0] and heaps[1]:
        if best is not None and heaps[0][0][0] + heaps[1][0][0] >= best:
            break
        side = 0 if heaps[0][0][0] <= heaps[1][0][0] else 1
        d, v = heapq.heappop(heaps[side])
        if v in settled[side]:
            continue
        settled[side].add(v)
        n_settled += 1
        for u, w, _ in adjs[side][v]:
            n_relaxed += 1
            nd = d + w
            if u not in dist[side] or nd < dist[side][u]:
                dist[side][u] = nd
                parent[side][u] = v
                heapq.heappush(heaps[side], (nd, u))
            if u in dist[1 - side]:
                total = dist[side][u] + dist[1 - side][u]
                if best is None or total < best or (total == best and u < meet):
                    best = total
                    meet = u
    if best is None:
        return PathResult(s, t, None, ()), SearchStats(n_settled, n_relaxed)
    fwd = [meet]
    while parent[0][fwd[-1]] is not None:
        fwd.append(parent[0][fwd[-1]])
    fwd.reverse()
    bwd = []
    v = meet
    while parent[1][v] is not None:
        v = parent[1][v]
        bwd.append(v)
    return PathResult(s, t, best, tuple(fwd + bwd)), SearchStats(n_settled, n_relaxed)


def all_pairs(g: Graph, max_nodes: int = 5000):
    """Full distance matrix via one Dijkstra per source."""
    if g.node_count > max_nodes:
        raise CapExceeded(f"all_pairs cap: {g.node_count} nodes > {max_nodes}")
    return [_distances(g, s) for s in range(g.node_count)]


def enumerate_shortest_paths(g: Graph, s: int, t: int, dist=None):
    """All tied shortest s-t paths as vertex tuples, in sorted order.

    Walks the shortest-path DAG backwards from ``t``; intended for the
    small instances where ties matter (the family graphs keep ties short).
    """
    g._check_node(s)
    g._check_node(t)
    if dist is None:
        dist = _distances(g, s)
    if dist[t] is None:
        return ()
    if s == t:
        return ((s,),)
    in_adj = g.in_adjacency()
    out: list[tuple[int, ...]] = []

    def walk(v, suffix, used):
        if v == s:
            out.append((s,) + suffix)
            return
        # zero-length edges can tie dist both ways; keep paths simple
        preds = sorted({u for u, w, _ in in_adj[v]
                        if u not in used and dist[u] is not None and dist[u] + w == dist[v]})
        for u in preds:
            walk(u, (v,) + suffix, used | {u})

    walk(t, (), {t})
    return tuple(sorted(out))


def perturb_unique(g: Graph) -> Graph:
    """Rescale lengths so equal-length route ties break deterministically.

    Every length w of the edge with id e becomes w*M + (e+1) where
    M = (node_count+1) * (edge_count+1).  Path order under the original
    lengths is preserved (a simple path collects strictly less than M of
    perturbation), so every perturbed shortest path was already one.
    """
    m = (g.node_count + 1) * (g.edge_count + 1)
    new_edges = []
    for eid, (u, v, w) in enumerate(g.edges):
        nw = w * m + (eid + 1)
        if nw > MAX_LENGTH:
            raise LengthOverflow(f"edge {eid}: perturbed length exceeds 64-bit range")
        new_edges.append((u, v, nw))
    return Graph(g.node_count, new_edges, directed=g.directed)


def graph_stats(g: Graph, max_nodes: int = 5000) -> GraphStats:
    """Diameter (max finite distance), max degree, and size counters."""
    matrix = all_pairs(g, max_nodes=max_nodes)
    diameter = 0
    for row in matrix:
        for d in row:
            if d is not None and d > diameter:
                diameter = d
    max_degree = max((len(adj) for adj in g.adjacency), default=0)
    return GraphStats(g.node_count, g.edge_count, max_degree, diameter)


def format_graph(g: Graph) -> str:
    """Text format: header 'p sp <n> <m> <d|u>', then 'a <u> <v> <w>' lines."""
    lines = [f"p sp {g.node_count} {g.edge_count} {'d' if g.directed else 'u'}"]
    for u, v, w in g.edges:
        lines.append(f"a {u} {v} {w}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Inverse of format_graph; validates every stated invariant."""
    header = None
    edges = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise InvariantViolation(f"line {ln}: duplicate header")
            if len(parts) != 5 or parts[1] != "sp" or parts[4] not in ("d", "u"):
                raise InvariantViolation(f"line {ln}: malformed header")
            header = (int(parts[2]), int(parts[3]), parts[4] == "d")
        elif parts[0] == "a":
            if header is None:
                raise InvariantViolation(f"line {ln}: edge before header")
            if len(parts) != 4:
                raise InvariantViolation(f"line {ln}: malformed edge line")
            edges.append((int(parts[1]), int(parts[2]), int(parts[3])))
        else:
            raise InvariantViolation(f"line {ln}: unknown record {parts[0]!r}")
    if header is None:
        raise InvariantViolation("missing 'p sp' header")
    n, m, directed = header
    if len(edges) != m:
        raise InvariantViolation(f"header says {m} edges, found {len(edges)}")
    return Graph(n, edges, directed=directed)


def save_graph(g: Graph, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))


def load_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())
