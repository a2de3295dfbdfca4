"""Highway dimension by exhaustive sweep with exact hitting sets.

The classic quantity is the smallest h such that, for every radius r and
every ball of radius 4r, some h nodes hit all shortest paths of length
at least r lying inside the ball.  Balls are strict: B_r(v) = {u :
dist(u,v) < r}.  Tied shortest paths each contribute their own set to
hit, since covering one of the ties does not cover "all shortest paths".

Only the distinct positive distance values need to be scanned as radii:
between consecutive values the required path set can only shrink while
the ball can only shrink too, and at each value both conditions are at
their widest for that breakpoint, so the exact maximum is attained on
the scanned set.

The refined variant additionally requires hitting every subpath of a
shortest path of length > r obtained by deleting zero, one, or both
endpoints (kept only when nonempty), again restricted to the ball.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, InvariantViolation
from .graph import Graph, all_pairs, enumerate_shortest_paths

DEFINITIONS = ("classic", "refined")


@dataclass(frozen=True)
class HittingInstance:
    universe: frozenset
    path_sets: tuple
    origin: tuple  # (center node, radius)

    def __post_init__(self):
        for ps in self.path_sets:
            if not ps:
                raise InvariantViolation("empty path set in hitting instance")
            if not ps <= self.universe:
                raise InvariantViolation("path set leaves the instance universe")


@dataclass(frozen=True)
class HighwayDimResult:
    h: int
    witness: tuple  # (radius, center, optimal hitting set)
    definition: str


def candidate_radii(g: Graph, max_nodes: int = 5000, matrix=None):
    """Distinct positive shortest-path lengths, ascending."""
    if matrix is None:
        matrix = all_pairs(g, max_nodes=max_nodes)
    values = set()
    for row in matrix:
        for d in row:
            if d is not None and d > 0:
                values.add(d)
    return tuple(sorted(values))


def ball(g: Graph, v: int, radius: int, dist_row=None):
    """Strict ball: every node u with dist(u, v) < radius."""
    g._check_node(v)
    if dist_row is None:
        dist_row = all_pairs(g)[v]
    return frozenset(u for u, d in enumerate(dist_row) if d is not None and d < radius)


def _tied_paths(g: Graph, matrix):
    """All tied shortest paths for every unordered finite pair."""
    out = {}
    for s in range(g.node_count):
        row = matrix[s]
        for t in range(s + 1, g.node_count):
            if row[t] is None:
                continue
            out[(s, t)] = enumerate_shortest_paths(g, s, t, dist=row)
    return out


def local_path_sets(g: Graph, v: int, r: int, definition: str = "classic",
                    matrix=None, pair_paths=None) -> HittingInstance:
    """The hitting instance at one (center, radius) combination."""
    if definition not in DEFINITIONS:
        raise InvariantViolation(f"unknown definition {definition!r}")
    if g.directed:
        raise InvariantViolation("highway dimension is defined on undirected graphs")
    if matrix is None:
        matrix = all_pairs(g)
    if pair_paths is None:
        pair_paths = _tied_paths(g, matrix)
    inside = ball(g, v, 4 * r, dist_row=matrix[v])
    sets = set()
    for (s, t), paths in pair_paths.items():
        d = matrix[s][t]
        if definition == "classic":
            if d < r:
                continue
            for path in paths:
                vs = frozenset(path)
                if vs <= inside:
                    sets.add(vs)
        else:
            if d <= r:
                continue
            for path in paths:
                for trimmed in (path, path[1:], path[:-1], path[1:-1]):
                    if not trimmed:
                        continue
                    vs = frozenset(trimmed)
                    if vs <= inside:
                        sets.add(vs)
    ordered = tuple(sorted(sets, key=lambda fs: (len(fs), sorted(fs))))
    return HittingInstance(inside, ordered, (v, r))


def _reduce_sets(path_sets):
    """Drop supersets: hitting every minimal set hits everything."""
    ordered = sorted(set(path_sets), key=len)
    kept = []
    for ps in ordered:
        if not any(other <= ps for other in kept):
            kept.append(ps)
    return kept


def greedy_cover_size(inst: HittingInstance) -> int:
    """Greedy hitting-set size; an upper bound on the exact optimum."""
    return len(_greedy_cover(_reduce_sets(inst.path_sets)))


def _greedy_cover(sets):
    uncovered = list(sets)
    chosen = []
    while uncovered:
        counts = {}
        for ps in uncovered:
            for x in ps:
                counts[x] = counts.get(x, 0) + 1
        pick = max(sorted(counts), key=lambda x: counts[x])
        chosen.append(pick)
        uncovered = [ps for ps in uncovered if pick not in ps]
    return chosen


def _packing_bound(sets):
    """Greedy pairwise-disjoint subfamily size; a lower bound."""
    used = set()
    count = 0
    for ps in sorted(sets, key=lambda fs: (len(fs), sorted(fs))):
        if not (ps & used):
            used |= ps
            count += 1
    return count


def min_hitting_set(inst: HittingInstance, max_sets: int = 64):
    """Exact minimum hitting set via branch and bound.

    Supersets are removed first (the cap applies to the irreducible
    family); then greedy gives the incumbent, a disjoint packing gives
    the bound, and branching follows the highest-occurrence element of
    the smallest uncovered set.  Refuses above the cap, never rounds.
    """
    sets = _reduce_sets(inst.path_sets)
    if len(sets) > max_sets:
        raise CapExceeded(f"hitting instance has {len(sets)} irreducible sets > cap {max_sets}")
    if not sets:
        return 0, frozenset()
    greedy = _greedy_cover(sets)
    best = list(greedy)

    def descend(uncovered, chosen):
        nonlocal best
        if not uncovered:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        if len(chosen) + max(1, _packing_bound(uncovered)) >= len(best):
            return
        target = min(uncovered, key=lambda fs: (len(fs), sorted(fs)))
        counts = {}
        for ps in uncovered:
            for x in ps:
                counts[x] = counts.get(x, 0) + 1
        for x in sorted(target, key=lambda e: (-counts[e], e)):
            rest = [ps for ps in uncovered if x not in ps]
            chosen.append(x)
            descend(rest, chosen)
            chosen.pop()

    descend(sets, [])
    return len(best), frozenset(best)


def highway_dimension(g: Graph, definition: str = "classic", *,
                      max_nodes: int = 5000, max_path_sets: int = 64) -> HighwayDimResult:
    """Exact sweep over all candidate radii and ball centers."""
    matrix = all_pairs(g, max_nodes=max_nodes)
    pair_paths = _tied_paths(g, matrix)
    best = 0
    witness = (0, 0, frozenset())
    for r in candidate_radii(g, matrix=matrix):
        for v in range(g.node_count):
            inst = local_path_sets(g, v, r, definition, matrix=matrix, pair_paths=pair_paths)
            size, hitting = min_hitting_set(inst, max_sets=max_path_sets)
            if size > best:
                best = size
                witness = (r, v, hitting)
    return HighwayDimResult(best, witness, definition)


def highway_dimension_upper(g: Graph, definition: str = "classic", *,
                            max_nodes: int = 5000) -> int:
    """Greedy-only sweep; an upper bound, reported as such (h_upper)."""
    matrix = all_pairs(g, max_nodes=max_nodes)
    pair_paths = _tied_paths(g, matrix)
    best = 0
    for r in candidate_radii(g, matrix=matrix):
        for v in range(g.node_count):
            inst = local_path_sets(g, v, r, definition, matrix=matrix, pair_paths=pair_paths)
            best = max(best, greedy_cover_size(inst))
    return best
