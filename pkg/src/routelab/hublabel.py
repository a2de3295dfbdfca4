"""Hub labeling: constructions, merge query, verification, exact oracle.

A labeling stores, per node v, a hub-sorted list of (hub, distance)
entries with v itself always present at distance 0.  The cover property
demands that every reachable pair shares a hub lying on one of its
shortest paths; verification always re-checks stored distances against
the Dijkstra oracle first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapExceeded, InvariantViolation
from .family import FamilyMeta, cross_edge_length, tree_edge_length
from .graph import Graph, all_pairs

from . import ch as _ch


class Labeling:
    """Per-node hub lists, each sorted ascending by hub id."""

    __slots__ = ("labels",)

    def __init__(self, labels):
        self.labels = tuple(tuple(sorted(lbl)) for lbl in labels)
        for v, lbl in enumerate(self.labels):
            hubs = [h for h, _ in lbl]
            if len(set(hubs)) != len(hubs):
                raise InvariantViolation(f"label of node {v} repeats a hub")

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def size(self, v: int) -> int:
        return len(self.labels[v])


def hl_query(labeling: Labeling, s: int, t: int):
    """Single linear merge of both labels.

    Returns (distance or None, meeting hub or None, comparisons); the
    comparison count never exceeds |L(s)| + |L(t)|.
    """
    ls = labeling.labels[s]
    lt = labeling.labels[t]
    i = j = 0
    comparisons = 0
    best = None
    hub = None
    while i < len(ls) and j < len(lt):
        comparisons += 1
        hs, ds = ls[i]
        ht, dt = lt[j]
        if hs == ht:
            total = ds + dt
            if best is None or total < best:
                best = total
                hub = hs
            i += 1
            j += 1
        elif hs < ht:
            i += 1
        else:
            j += 1
    return best, hub, comparisons


def verify_cover(g: Graph, labeling: Labeling, dist_matrix=None, max_nodes: int = 5000):
    """None when the cover property holds, else the first violating pair.

    Stored distances are validated against the oracle before the cover
    check; a wrong distance raises instead of reporting a pair.
    """
    if g.directed:
        raise InvariantViolation("verify_cover expects an undirected graph")
    if labeling.node_count != g.node_count:
        raise InvariantViolation("labeling size does not match the graph")
    if dist_matrix is None:
        dist_matrix = all_pairs(g, max_nodes=max_nodes)
    for v, lbl in enumerate(labeling.labels):
        for hub, d in lbl:
            if dist_matrix[v][hub] != d:
                raise InvariantViolation(
                    f"label of node {v} stores distance {d} to hub {hub}, oracle says {dist_matrix[v][hub]}"
                )
    for s in range(g.node_count):
        row = dist_matrix[s]
        for t in range(s, g.node_count):
            if row[t] is None:
                continue
            found = False
            for hub, ds in labeling.labels[s]:
                dt = _label_distance(labeling.labels[t], hub)
                if dt is not None and ds + dt == row[t]:
                    found = True
                    break
            if not found:
                return (s, t)
    return None


def _label_distance(label, hub):
    lo, hi = 0, len(label)
    while lo < hi:
        mid = (lo + hi) // 2
        if label[mid][0] < hub:
            lo = mid + 1
        else:
            hi = mid
    if lo < len(label) and label[lo][0] == hub:
        return label[lo][1]
    return None


def structural_labeling(g: Graph, meta: FamilyMeta) -> Labeling:
    """Ancestor labeling for a family instance.

    L(v in copy a) holds every copy of every ancestor-or-self position of
    v, so any predicted route's apex sits in both endpoint labels.  Sizes
    are exactly q * (k - height(v) + 1).
    """
    params = meta.params
    labels = []
    for v in range(g.node_count):
        addr = meta.address[v]
        own = meta.copy[v]
        entries = []
        for depth in range(len(addr) + 1):
            pos_addr = addr[:depth]
            w_height = params.k - depth
            for b in range(params.q):
                hub = meta.node_id(b, pos_addr)
                if b == own:
                    d = 0 if depth == len(addr) else tree_edge_length(w_height, params.scale_exponent)
                else:
                    d = cross_edge_length(meta.height[v], params.k, params.scale_exponent)
                    if depth != len(addr):
                        d += tree_edge_length(w_height, params.scale_exponent)
                entries.append((hub, d))
        labels.append(entries)
    return Labeling(labels)


def ch_labeling(g: Graph, idx) -> Labeling:
    """Labels from the upward search spaces of a contraction hierarchy.

    Entries whose relaxed upward distance overshoots the true distance
    are dropped: they can never win a query and would break the exact-
    distance invariant.  The top-ranked node of every shortest path
    survives in both endpoint spaces, so the cover property holds.
    """
    matrix = all_pairs(g)
    labels = []
    for v in range(g.node_count):
        space, _ = _ch.upward_search(idx, v)
        labels.append([(x, d) for x, d in space.items() if matrix[v][x] == d])
    return Labeling(labels)


def label_stats(labeling: Labeling):
    total = sum(len(lbl) for lbl in labeling.labels)
    biggest = max((len(lbl) for lbl in labeling.labels), default=0)
    n = labeling.node_count
    return {
        "total": total,
        "max": biggest,
        "avg_query_cost": (2 * total / n) if n else 0.0,
    }


@dataclass(frozen=True)
class CensusClass:
    lca_height: int
    enumerated: int
    formula: int


@dataclass(frozen=True)
class PathClassCensus:
    classes: tuple[CensusClass, ...]

    @property
    def consistent(self) -> bool:
        return all(c.enumerated == c.formula for c in self.classes)


def path_class_census(meta: FamilyMeta) -> PathClassCensus:
    """Cross-copy leaf pairs grouped by the height of their meeting ancestor.

    Enumerates unordered pairs {s in copy a, t in copy b} with a != b and
    checks each class size against q-choose-2 * t**k * (t**i - t**(i-1)).
    """
    params = meta.params
    if params.q < 2:
        return PathClassCensus(())
    leaves = meta.leaves()
    counts = {i: 0 for i in range(1, params.k + 1)}
    for i_a, a in enumerate(leaves):
        for b in leaves[i_a + 1:]:
            if meta.copy[a] == meta.copy[b]:
                continue
            if meta.address[a] == meta.address[b]:
                continue
            counts[meta.lca_height(a, b)] += 1
    choose_q = params.q * (params.q - 1) // 2
    rows = []
    for i in range(1, params.k + 1):
        formula = choose_q * params.t ** params.k * (params.t ** i - params.t ** (i - 1))
        rows.append(CensusClass(i, counts[i], formula))
    return PathClassCensus(tuple(rows))


def exact_min_total_labeling(g: Graph, max_nodes: int = 8):
    """Minimum possible sum of label sizes, by exhaustive branch and bound.

    Every finite unordered pair is assigned a hub on one of its shortest
    paths; labels are the unions of those assignments plus the forced
    self-hubs.  Pairs are processed fewest-candidates-first and branches
    are cut on the running total, so the search is exact.
    """
    if g.directed:
        raise InvariantViolation("the exact labeling oracle expects an undirected graph")
    if g.node_count > max_nodes:
        raise CapExceeded(f"exact labeling oracle cap: {g.node_count} nodes > {max_nodes}")
    n = g.node_count
    matrix = all_pairs(g)
    pairs = []
    for s in range(n):
        for t in range(s + 1, n):
            d = matrix[s][t]
            if d is None:
                continue
            cands = tuple(x for x in range(n)
                          if matrix[s][x] is not None and matrix[x][t] is not None
                          and matrix[s][x] + matrix[x][t] == d)
            pairs.append((s, t, cands))
    pairs.sort(key=lambda p: (len(p[2]), p[0], p[1]))

    labels = [{v} for v in range(n)]
    best_total = math.inf
    best_labels = None

    def greedy_total():
        sets = [set(lbl) for lbl in labels]
        for s, t, cands in pairs:
            if any(x in sets[s] and x in sets[t] for x in cands):
                continue
            chosen = min(cands, key=lambda x: ((x not in sets[s]) + (x not in sets[t]), x))
            sets[s].add(chosen)
            sets[t].add(chosen)
        return sets, sum(len(x) for x in sets)

    seed_sets, seed_total = greedy_total()
    best_total = seed_total
    best_labels = [set(x) for x in seed_sets]

    def descend(idx, total):
        nonlocal best_total, best_labels
        if total >= best_total:
            return
        while idx < len(pairs):
            s, t, cands = pairs[idx]
            if any(x in labels[s] and x in labels[t] for x in cands):
                idx += 1
                continue
            break
        if idx == len(pairs):
            best_total = total
            best_labels = [set(lbl) for lbl in labels]
            return
        s, t, cands = pairs[idx]
        options = sorted(cands, key=lambda x: ((x not in labels[s]) + (x not in labels[t]), x))
        for x in options:
            added_s = x not in labels[s]
            added_t = x not in labels[t]
            cost = added_s + added_t
            if added_s:
                labels[s].add(x)
            if added_t:
                labels[t].add(x)
            descend(idx + 1, total + cost)
            if added_s:
                labels[s].remove(x)
            if added_t:
                labels[t].remove(x)

    descend(0, n)
    final = [sorted(lbl) for lbl in best_labels]
    labeling = Labeling([[(h, matrix[v][h]) for h in lbl] for v, lbl in enumerate(final)])
    return labeling, int(best_total)


def format_labels(labeling: Labeling) -> str:
    """Dump format: one line per node, 'v: (hub,dist) (hub,dist) ...'."""
    lines = []
    for v, lbl in enumerate(labeling.labels):
        entries = " ".join(f"({h},{d})" for h, d in lbl)
        lines.append(f"{v}: {entries}".rstrip())
    return "\n".join(lines) + "\n"


def parse_labels(text: str) -> Labeling:
    rows = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        v = int(head)
        entries = []
        for token in rest.split():
            if not (token.startswith("(") and token.endswith(")")):
                raise InvariantViolation(f"bad label token {token!r}")
            h, d = token[1:-1].split(",")
            entries.append((int(h), int(d)))
        rows[v] = entries
    if rows and sorted(rows) != list(range(len(rows))):
        raise InvariantViolation("label dump does not cover a dense node range")
    return Labeling([rows[v] for v in range(len(rows))])
