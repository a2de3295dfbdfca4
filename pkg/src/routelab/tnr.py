"""Transit node routing over a contraction hierarchy.

Transit nodes are the highest-ranked nodes of the hierarchy.  Per node,
an upward search pruned at transit nodes (settled, never relaxed past)
yields both the access-node candidates and the locality-filter data; a
full Dijkstra from every transit node supplies the distance table and
exact access distances.  The filter errs only one way: a query is
declared global only when the pruned search spaces share no non-transit
node, in which case some shortest path must cross a transit node on
both sides and the access-pair minimum is exact.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import CapExceeded, InvariantViolation
from .graph import Graph, _distances

from . import ch as _ch


@dataclass(frozen=True)
class TNRQueryStats:
    classified: str  # "local" | "global"
    access_pairs: int
    fallback_settled: int


@dataclass(frozen=True)
class TNRIndex:
    fallback: "_ch.CHIndex"
    transit: tuple[int, ...]  # sorted node ids
    transit_size: int
    table: tuple  # table[i][j] = dist(transit[i], transit[j]) or None
    access: tuple  # per node: ((transit node, exact distance), ...)
    spaces: tuple  # per node: frozenset of settled non-transit nodes

    @property
    def graph(self) -> Graph:
        return self.fallback.graph


def _pruned_upward_space(idx, s, transit):
    """Settled nodes of the upward search that never relaxes past transit."""
    dist = {s: 0}
    settled = set()
    heap = [(0, s)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in settled:
            continue
        settled.add(v)
        if v in transit:
            continue
        for u, w in idx.upward[v]:
            nd = d + w
            if u not in dist or nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return settled


def build_tnr(idx, transit_size: int | None = None) -> TNRIndex:
    """Assemble the index; default transit size is ceil(sqrt(n))."""
    g = idx.graph
    n = g.node_count
    if transit_size is None:
        transit_size = math.isqrt(n) + (0 if math.isqrt(n) ** 2 == n else 1)
    if transit_size > n or transit_size < 0:
        raise InvariantViolation(f"transit_size {transit_size} out of range for {n} nodes")
    by_rank = idx.order.nodes_by_rank()
    transit_set = frozenset(by_rank[n - transit_size:]) if transit_size else frozenset()
    transit = tuple(sorted(transit_set))
    t_index = {t: i for i, t in enumerate(transit)}
    t_dist = [_distances(g, t) for t in transit]
    table = tuple(tuple(t_dist[i][t] for t in transit) for i in range(len(transit)))
    access = []
    spaces = []
    for v in range(n):
        settled = _pruned_upward_space(idx, v, transit_set)
        spaces.append(frozenset(settled - transit_set))
        cands = sorted(((t_dist[t_index[t]][v], t) for t in settled & transit_set))
        kept: list[tuple[int, int]] = []
        for d, t in cands:
            dominated = False
            for dk, tk in kept:
                via = table[t_index[tk]][t_index[t]]
                if via is not None and dk + via == d:
                    dominated = True
                    break
            if not dominated:
                kept.append((d, t))
        access.append(tuple((t, d) for d, t in kept))
    return TNRIndex(idx, transit, transit_size, table, tuple(access), tuple(spaces))


def locality_filter(tnr: TNRIndex, s: int, t: int) -> str:
    """"global" iff the pruned search spaces share no non-transit node."""
    tnr.graph._check_node(s)
    tnr.graph._check_node(t)
    return "local" if tnr.spaces[s] & tnr.spaces[t] else "global"


def tnr_query(tnr: TNRIndex, s: int, t: int):
    """Distance via table lookups on global pairs, hierarchy fallback else."""
    if locality_filter(tnr, s, t) == "global":
        t_index = {x: i for i, x in enumerate(tnr.transit)}
        best = None
        pairs = 0
        for u, du in tnr.access[s]:
            for w, dw in tnr.access[t]:
                pairs += 1
                mid = tnr.table[t_index[u]][t_index[w]]
                if mid is None:
                    continue
                total = du + mid + dw
                if best is None or total < best:
                    best = total
        return best, TNRQueryStats("global", pairs, 0)
    dist, _, stats = _ch.ch_query(tnr.fallback, s, t)
    return dist, TNRQueryStats("local", 0, stats.settled)


def access_stats(tnr: TNRIndex, max_pairs: int = 2_000_000):
    """Exact statistics over all ordered node pairs."""
    n = tnr.graph.node_count
    total_pairs = n * (n - 1)
    if total_pairs > max_pairs:
        raise CapExceeded(f"access stats sweep of {total_pairs} pairs exceeds cap {max_pairs}")
    sizes = [len(a) for a in tnr.access]
    global_pairs = 0
    pair_products = 0
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            if locality_filter(tnr, s, t) == "global":
                global_pairs += 1
                pair_products += sizes[s] * sizes[t]
    return {
        "avg_access": sum(sizes) / n if n else 0.0,
        "max_access": max(sizes, default=0),
        "global_fraction": global_pairs / total_pairs if total_pairs else 0.0,
        "avg_access_pairs_over_global": pair_products / global_pairs if global_pairs else 0.0,
    }


def regular_census(meta, tnr: TNRIndex):
    """Ordered cross-copy leaf pairs split into regular and irregular.

    A pair is regular when it is classified global and neither endpoint
    is a transit node; everything else (local, or touching a transit
    node) is irregular.
    """
    transit = set(tnr.transit)
    leaves = meta.leaves()
    regular = 0
    irregular = 0
    for s in leaves:
        for t in leaves:
            if s == t or meta.copy[s] == meta.copy[t]:
                continue
            if (
                s not in transit
                and t not in transit
                and locality_filter(tnr, s, t) == "global"
            ):
                regular += 1
            else:
                irregular += 1
    total = regular + irregular
    return {
        "regular": regular,
        "irregular": irregular,
        "fraction": regular / total if total else 0.0,
    }


def format_access(tnr: TNRIndex) -> str:
    """Dump format: one line per node, 'v: (transit,dist) ...'."""
    lines = []
    for v, entries in enumerate(tnr.access):
        body = " ".join(f"({t},{d})" for t, d in entries)
        lines.append(f"{v}: {body}".rstrip())
    return "\n".join(lines) + "\n"
