"""Contraction hierarchies: preprocessing, upward query, and censuses.

Contraction removes nodes in rank order; a shortcut u-w is added only
when no witness path of length <= len(u,v) + len(v,w) survives in the
remaining graph without v (exact, unbounded witness search — ties never
produce a shortcut, lengths are what must be preserved).  Queries run
two exhaustive upward searches and meet in the middle; work is reported
as machine-independent settled/relaxed counters.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass

from .errors import InvariantViolation
from .family import FamilyMeta
from .graph import Graph, SearchStats

STRATEGIES = ("by_height", "edge_difference", "input", "random", "explicit")


@dataclass(frozen=True)
class ContractionOrder:
    """rank[v] = position at which v is contracted (a bijection onto 0..n-1)."""

    rank: tuple[int, ...]
    strategy: str
    seed: int | None = None

    def __post_init__(self):
        if sorted(self.rank) != list(range(len(self.rank))):
            raise InvariantViolation("rank is not a permutation")

    def nodes_by_rank(self):
        order = [0] * len(self.rank)
        for v, r in enumerate(self.rank):
            order[r] = v
        return tuple(order)


@dataclass(frozen=True)
class CHIndex:
    graph: Graph
    order: ContractionOrder
    e_plus: tuple[tuple[int, int, int, int], ...]  # (u, v, length, introduced_at_rank)
    upward: tuple[tuple[tuple[int, int], ...], ...]
    # Remaining-graph neighborhood of each node at its contraction time,
    # as ((neighbor, length), ...); feeds the census operations.
    neighborhoods: tuple[tuple[tuple[int, int], ...], ...]


def build_order(g: Graph, strategy: str, meta: FamilyMeta | None = None,
                seed: int | None = None, explicit=None) -> ContractionOrder:
    """Contraction orders: by_height, edge_difference, input, random, explicit.

    by_height needs family metadata and sorts by ascending height with
    ties by (copy, node id).  edge_difference is the lazy-recomputation
    greedy on (shortcuts added - edges removed), ties by lower current
    degree then lower id.  All strategies are deterministic given inputs.
    """
    n = g.node_count
    if strategy == "by_height":
        if meta is None:
            raise InvariantViolation("by_height order requires family metadata")
        nodes = sorted(range(n), key=lambda v: (meta.height[v], meta.copy[v], v))
        rank = [0] * n
        for pos, v in enumerate(nodes):
            rank[v] = pos
        return ContractionOrder(tuple(rank), "by_height")
    if strategy == "input":
        return ContractionOrder(tuple(range(n)), "input")
    if strategy == "random":
        if seed is None:
            raise InvariantViolation("random order requires a seed")
        nodes = list(range(n))
        random.Random(seed).shuffle(nodes)
        rank = [0] * n
        for pos, v in enumerate(nodes):
            rank[v] = pos
        return ContractionOrder(tuple(rank), "random", seed)
    if strategy == "explicit":
        if explicit is None:
            raise InvariantViolation("explicit order requires a rank sequence")
        return ContractionOrder(tuple(explicit), "explicit")
    if strategy == "edge_difference":
        return _edge_difference_order(g)
    raise InvariantViolation(f"unknown order strategy {strategy!r}")


def _remaining_adjacency(g: Graph):
    """Mutable adjacency with parallel edges collapsed to the minimum length."""
    remaining: list[dict[int, int]] = [dict() for _ in range(g.node_count)]
    for u, v, w in g.edges:
        if v not in remaining[u] or w < remaining[u][v]:
            remaining[u][v] = w
            remaining[v][u] = w
    return remaining


def _witness_distances(remaining, source: int, excluded: int, targets, bound: int):
    """Shortest distances from source avoiding ``excluded``, capped at bound."""
    dist = {source: 0}
    heap = [(0, source)]
    todo = set(targets)
    todo.discard(source)
    out = {}
    while heap and todo:
        d, v = heapq.heappop(heap)
        if d > bound:
            break
        if d != dist[v]:
            continue
        if v in todo:
            out[v] = d
            todo.discard(v)
        for u, w in remaining[v].items():
            if u == excluded:
                continue
            nd = d + w
            if nd <= bound and (u not in dist or nd < dist[u]):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return out


def _hop_limited_witness(remaining, source: int, excluded: int, hop_limit: int):
    """Best distances reachable within hop_limit edges, avoiding ``excluded``.

    Round-based relaxation; may miss longer witnesses, which only makes
    the contraction add extra (still length-true) shortcuts.
    """
    dist = {source: 0}
    frontier = {source: 0}
    for _ in range(hop_limit):
        nxt = {}
        for v, d in frontier.items():
            for u, w in remaining[v].items():
                if u == excluded:
                    continue
                nd = d + w
                if nd < dist.get(u, nd + 1):
                    dist[u] = nd
                    nxt[u] = nd
        if not nxt:
            break
        frontier = nxt
    return dist


def _contract_node(remaining, v: int, apply: bool, hop_limit: int | None = None):
    """Shortcuts required to remove v; optionally applies the contraction.

    Returns a list of (u, w, length) with u < w.  A shortcut is required
    only when every surviving u-w route is strictly longer than through
    v; a hop limit makes the witness search miss long routes and so can
    only add shortcuts (each still carries a true path length).
    """
    nbrs = sorted(remaining[v])
    shortcuts = []
    for i, u in enumerate(nbrs):
        targets = nbrs[i + 1:]
        if not targets:
            continue
        du = remaining[v][u]
        cands = {w: du + remaining[v][w] for w in targets}
        bound = max(cands.values())
        if hop_limit is None:
            witness = _witness_distances(remaining, u, v, targets, bound)
        else:
            witness = _hop_limited_witness(remaining, u, v, hop_limit)
        for w in targets:
            if w not in witness or witness[w] > cands[w]:
                shortcuts.append((u, w, cands[w]))
    if apply:
        for u, w, length in shortcuts:
            if w not in remaining[u] or length < remaining[u][w]:
                remaining[u][w] = length
                remaining[w][u] = length
        for u in nbrs:
            del remaining[u][v]
        remaining[v].clear()
    return shortcuts


def _edge_difference_order(g: Graph) -> ContractionOrder:
    remaining = _remaining_adjacency(g)

    def priority(v):
        degree = len(remaining[v])
        added = len(_contract_node(remaining, v, apply=False))
        return (added - degree, degree, v)

    heap = [(priority(v), v) for v in range(g.node_count)]
    heapq.heapify(heap)
    rank = [None] * g.node_count
    pos = 0
    while heap:
        prio, v = heapq.heappop(heap)
        if rank[v] is not None:
            continue
        fresh = priority(v)
        if heap and fresh > heap[0][0]:
            heapq.heappush(heap, (fresh, v))
            continue
        _contract_node(remaining, v, apply=True)
        rank[v] = pos
        pos += 1
    return ContractionOrder(tuple(rank), "edge_difference")


def contract_preprocess(g: Graph, order: ContractionOrder,
                        hop_limit: int | None = None) -> CHIndex:
    """Run the full contraction sweep and assemble the upward index.

    The default witness search is exact and unbounded; pass hop_limit
    for the faster bounded mode (more shortcuts, identical distances).
    """
    if g.directed:
        raise InvariantViolation("contraction requires an undirected graph")
    remaining = _remaining_adjacency(g)
    e_plus = []
    neighborhoods: list[tuple[tuple[int, int], ...]] = [()] * g.node_count
    for r, v in enumerate(order.nodes_by_rank()):
        neighborhoods[v] = tuple(sorted(remaining[v].items()))
        for u, w, length in _contract_node(remaining, v, apply=True, hop_limit=hop_limit):
            e_plus.append((u, w, length, r))
    upward: list[dict[int, int]] = [dict() for _ in range(g.node_count)]
    rank = order.rank

    def add_up(a, b, w):
        lo, hi = (a, b) if rank[a] < rank[b] else (b, a)
        if hi not in upward[lo] or w < upward[lo][hi]:
            upward[lo][hi] = w

    for u, v, w in g.edges:
        add_up(u, v, w)
    for u, v, w, _ in e_plus:
        add_up(u, v, w)
    upward_t = tuple(tuple(sorted(d.items())) for d in upward)
    return CHIndex(g, order, tuple(e_plus), upward_t, tuple(neighborhoods))


def upward_search(idx: CHIndex, s: int):
    """Exhaustive Dijkstra over upward edges; returns (dist dict, relaxed)."""
    dist = {s: 0}
    settled = {}
    heap = [(0, s)]
    relaxed = 0
    while heap:
        d, v = heapq.heappop(heap)
        if v in settled:
            continue
        settled[v] = d
        for u, w in idx.upward[v]:
            relaxed += 1
            nd = d + w
            if u not in dist or nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return settled, relaxed


def ch_query(idx: CHIndex, s: int, t: int):
    """Distance query over the hierarchy.

    Returns (distance or None, meeting node or None, SearchStats); the
    distance equals the plain Dijkstra distance on the base graph.
    """
    idx.graph._check_node(s)
    idx.graph._check_node(t)
    fwd, relaxed_f = upward_search(idx, s)
    bwd, relaxed_b = upward_search(idx, t)
    best = None
    meet = None
    for v, df in fwd.items():
        db = bwd.get(v)
        if db is None:
            continue
        total = df + db
        if best is None or total < best or (total == best and v < meet):
            best = total
            meet = v
    stats = SearchStats(settled=len(fwd) + len(bwd), relaxed=relaxed_f + relaxed_b)
    return best, meet, stats


@dataclass(frozen=True)
class ShortcutDelta:
    """Net leaf-edge gain of contracting a non-leaf v before some leaves.

    child_counts[i] = leaves below v's i-th child still ranked after v;
    net_gain = sum over unordered child pairs of c_i * c_j minus sum c_i.
    """

    node: int
    child_counts: tuple[int, ...]
    net_gain: int


def shortcut_delta(meta: FamilyMeta, order: ContractionOrder, v: int) -> ShortcutDelta:
    if meta.height[v] == 0:
        raise InvariantViolation("shortcut_delta is defined for non-leaf nodes")
    params = meta.params
    c, addr = meta.copy[v], meta.address[v]
    rank_v = order.rank[v]
    counts = []
    depth_below_child = meta.height[v] - 1
    for child_digit in range(params.t):
        child_addr = addr + (child_digit,)
        cnt = 0
        for leaf_suffix in _suffixes(params.t, depth_below_child):
            leaf = meta.node_id(c, child_addr + leaf_suffix)
            if order.rank[leaf] > rank_v:
                cnt += 1
        counts.append(cnt)
    pair_sum = 0
    for i in range(len(counts)):
        for j in range(i + 1, len(counts)):
            pair_sum += counts[i] * counts[j]
    return ShortcutDelta(v, tuple(counts), pair_sum - sum(counts))


def _suffixes(t: int, depth: int):
    out = [()]
    for _ in range(depth):
        out = [a + (d,) for a in out for d in range(t)]
    return out


def leaf_shortcut_census(meta: FamilyMeta, idx: CHIndex):
    """Shortcuts introduced while contracting leaves, against the predicted set.

    Prediction (by-height order): for every pair of copies of a leaf s,
    the later-contracted copy s_late gains one shortcut to each proper
    ancestor of s in the earlier copy.  Both directions of the if-and-
    only-if are checked: missing predicted edges and unpredicted actual
    edges each count as violations.
    """
    if idx.order.strategy != "by_height":
        raise InvariantViolation("leaf shortcut census requires the by_height order")
    rank = idx.order.rank
    leaf_ranks = {rank[v] for v in meta.leaves()}
    actual = {frozenset((u, v)) for u, v, _, r in idx.e_plus if r in leaf_ranks}
    actual_count = sum(1 for _, _, _, r in idx.e_plus if r in leaf_ranks)
    predicted = set()
    per_copy = meta.params.nodes_per_copy
    for pos in range(per_copy):
        if meta.height[pos] != 0:
            continue
        copies = [c * per_copy + pos for c in range(meta.params.q)]
        ancestors = meta.address[pos]
        for a in copies:
            for b in copies:
                if a == b or rank[b] >= rank[a]:
                    continue
                for i in range(len(ancestors)):
                    w_node = meta.node_id(meta.copy[b], meta.address[pos][:i])
                    predicted.add(frozenset((a, w_node)))
    violations = len(actual ^ predicted)
    return {
        "leaf_shortcuts": actual_count,
        "predicted": len(predicted),
        "criterion_violations": violations,
    }


def leaf_edge_census(meta: FamilyMeta, idx: CHIndex):
    """Same-copy edges incident to each leaf at its contraction time.

    Returns per-copy sums and the overall total; driven entirely by the
    neighborhood snapshots recorded during preprocessing.
    """
    per_copy = [0] * meta.params.q
    for v in meta.leaves():
        c = meta.copy[v]
        for nbr, _ in idx.neighborhoods[v]:
            if meta.copy[nbr] == c:
                per_copy[c] += 1
    return {"per_copy": tuple(per_copy), "total": sum(per_copy)}


def ch_stats(idx: CHIndex, pairs=None):
    """E+ size plus average settled/relaxed over the given ordered pairs."""
    g = idx.graph
    if pairs is None:
        pairs = [(s, t) for s in range(g.node_count) for t in range(g.node_count) if s != t]
    total_settled = 0
    total_relaxed = 0
    count = 0
    for s, t in pairs:
        _, _, stats = ch_query(idx, s, t)
        total_settled += stats.settled
        total_relaxed += stats.relaxed
        count += 1
    return {
        "e_plus": len(idx.e_plus),
        "avg_settled": total_settled / count if count else 0.0,
        "avg_relaxed": total_relaxed / count if count else 0.0,
    }


def format_e_plus(idx: CHIndex) -> str:
    lines = [f"{u} {v} {w} {r}" for u, v, w, r in idx.e_plus]
    return "\n".join(lines) + ("\n" if lines else "")
