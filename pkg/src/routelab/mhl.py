"""Minimum hub labeling hardness lab: X3C instances, the reduction, and
an exhaustive decider for tiny directed instances.

The reduction maps an exact-cover-by-3-sets instance (U, C) to a unit-
length digraph on A + C + U + B with |A| = 2, |B| = 2k - 1 for the label
budget k = |U|/3 + 1, and a marked B' of |U|/3 - 1 clique members wired
to every element.  The decider assigns every reachable ordered pair a
hub on one of its shortest paths under per-label budget k; it is a
complete search, so its "no" answers are proofs at this size.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, InvariantViolation
from .graph import Graph, _distances


@dataclass(frozen=True)
class X3CInstance:
    universe_size: int
    triples: tuple[frozenset, ...]

    def __post_init__(self):
        if self.universe_size % 3 != 0 or self.universe_size <= 0:
            raise InvariantViolation("universe size must be a positive multiple of 3")
        for tri in self.triples:
            if len(tri) != 3 or not all(0 <= x < self.universe_size for x in tri):
                raise InvariantViolation("each triple must hold 3 distinct universe elements")


def parse_x3c(text: str) -> X3CInstance:
    """Text format: first line |U|, then one triple per line (0-based)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvariantViolation("empty instance file")
    size = int(lines[0])
    triples = []
    for ln in lines[1:]:
        parts = [int(x) for x in ln.split()]
        if len(parts) != 3:
            raise InvariantViolation(f"triple line {ln!r} does not hold 3 indices")
        triples.append(frozenset(parts))
    return X3CInstance(size, tuple(triples))


def format_x3c(inst: X3CInstance) -> str:
    lines = [str(inst.universe_size)]
    for tri in inst.triples:
        lines.append(" ".join(str(x) for x in sorted(tri)))
    return "\n".join(lines) + "\n"


def x3c_solve(inst: X3CInstance):
    """An exact 3-cover as a tuple of triples, or None.

    Depth-first search: always branch on the uncovered element contained
    in the fewest still-usable triples.
    """
    universe = frozenset(range(inst.universe_size))
    if not all(any(x in tri for tri in inst.triples) for x in universe):
        return None

    def descend(covered, chosen):
        if covered == universe:
            return tuple(sorted(chosen, key=sorted))
        options = {}
        for x in universe - covered:
            usable = [tri for tri in inst.triples if x in tri and not (tri & covered)]
            options[x] = usable
        pivot = min(sorted(options), key=lambda x: len(options[x]))
        for tri in sorted(options[pivot], key=sorted):
            result = descend(covered | tri, chosen + [tri])
            if result is not None:
                return result
        return None

    return descend(frozenset(), [])


@dataclass(frozen=True)
class MHLInstance:
    graph: Graph
    k: int
    a_nodes: tuple[int, ...]
    c_nodes: tuple[int, ...]
    u_nodes: tuple[int, ...]
    b_nodes: tuple[int, ...]
    b_prime: tuple[int, ...]

    def tags(self):
        out = {}
        for v in self.a_nodes:
            out[v] = "A"
        for v in self.c_nodes:
            out[v] = "C"
        for v in self.u_nodes:
            out[v] = "U"
        for v in self.b_nodes:
            out[v] = "Bp" if v in set(self.b_prime) else "B"
        return out


def reduce_x3c_to_mhl(inst: X3CInstance) -> MHLInstance:
    """Build the hardness digraph for (U, C) with budget k = |U|/3 + 1.

    Arcs, all unit length: both A nodes to every C node; each C node to
    its three elements; the B clique in both directions; every B' node
    to every element.  Elements covered by no triple are refused (the
    instance equivalence is only argued for covering families).
    """
    nu = inst.universe_size
    for x in range(nu):
        if not any(x in tri for tri in inst.triples):
            raise InvariantViolation(f"element {x} is covered by no triple; reduction refused")
    k = nu // 3 + 1
    nb = 2 * k - 1
    a_nodes = (0, 1)
    c_nodes = tuple(2 + i for i in range(len(inst.triples)))
    u_base = 2 + len(inst.triples)
    u_nodes = tuple(u_base + j for j in range(nu))
    b_base = u_base + nu
    b_nodes = tuple(b_base + l for l in range(nb))
    b_prime = b_nodes[: nu // 3 - 1]
    edges = []
    for a in a_nodes:
        for c in c_nodes:
            edges.append((a, c, 1))
    for i, tri in enumerate(inst.triples):
        for x in sorted(tri):
            edges.append((c_nodes[i], u_nodes[x], 1))
    for b1 in b_nodes:
        for b2 in b_nodes:
            if b1 != b2:
                edges.append((b1, b2, 1))
    for bp in b_prime:
        for u in u_nodes:
            edges.append((bp, u, 1))
    g = Graph(b_base + nb, edges, directed=True)
    return MHLInstance(g, k, a_nodes, c_nodes, u_nodes, b_nodes, b_prime)


class DirectedLabeling:
    """Forward and reverse hub lists, each sorted ascending by hub id."""

    __slots__ = ("forward", "reverse")

    def __init__(self, forward, reverse):
        self.forward = tuple(tuple(sorted(lbl)) for lbl in forward)
        self.reverse = tuple(tuple(sorted(lbl)) for lbl in reverse)
        if len(self.forward) != len(self.reverse):
            raise InvariantViolation("forward/reverse label counts differ")

    @property
    def node_count(self) -> int:
        return len(self.forward)

    def max_label(self) -> int:
        sizes = [len(l) for l in self.forward] + [len(l) for l in self.reverse]
        return max(sizes, default=0)


def clique_window_labels(count: int, k: int):
    """Cyclic hub windows covering a bidirected clique of 2k-1 nodes.

    Both labels of member i hold the k cyclically-consecutive indices
    i..i+k-1.  For an ordered pair (i, j): when the cyclic gap j-i is at
    most k-1 the target j lies in the forward window of i; otherwise the
    gap i-j is at most k-1 and the source i lies in the reverse window
    of j.  Either way an endpoint of the edge is a shared hub.
    """
    if count != 2 * k - 1:
        raise InvariantViolation("window labels require a clique of exactly 2k-1 members")
    windows = []
    for i in range(count):
        windows.append(tuple((i + j) % count for j in range(k)))
    return windows


def labeling_from_cover(mhl: MHLInstance, cover) -> DirectedLabeling:
    """The explicit labeling induced by an exact cover.

    A-nodes: forward = self plus the cover, reverse empty.  C-nodes:
    reverse = A; forward is the bare self for cover members (their
    element pairs ride on the element's reverse label) and the three
    elements otherwise.  Elements: forward empty, reverse = self, the
    covering triple's node, and all of B'.  B-clique: cyclic windows.
    """
    cover = tuple(cover)
    cover_sets = set(cover)
    covered = set()
    for tri in cover:
        if tri & covered:
            raise InvariantViolation("cover triples are not disjoint")
        covered |= tri
    if covered != set(range(len(mhl.u_nodes))):
        raise InvariantViolation("cover does not hit every element")
    g = mhl.graph
    n = g.node_count
    dist = [_distances(g, s) for s in range(n)]
    triple_by_node = {mhl.c_nodes[i]: tri for i, tri in enumerate(_instance_triples(mhl))}
    # first node carrying each cover triple becomes its designated hub
    designated = {}
    for c in mhl.c_nodes:
        tri = triple_by_node[c]
        if tri in cover_sets and tri not in designated:
            designated[tri] = c
    covering_c = {}
    for tri, c in designated.items():
        for x in tri:
            covering_c[x] = c
    forward = [[] for _ in range(n)]
    reverse = [[] for _ in range(n)]
    for a in mhl.a_nodes:
        forward[a].append((a, 0))
        for c in sorted(set(covering_c.values())):
            forward[a].append((c, 1))
    for c in mhl.c_nodes:
        tri = triple_by_node[c]
        if designated.get(tri) == c:
            forward[c].append((c, 0))
        else:
            for x in sorted(tri):
                forward[c].append((mhl.u_nodes[x], 1))
        for a in mhl.a_nodes:
            reverse[c].append((a, 1))
    for x in range(len(mhl.u_nodes)):
        u = mhl.u_nodes[x]
        reverse[u].append((u, 0))
        reverse[u].append((covering_c[x], 1))
        for bp in mhl.b_prime:
            reverse[u].append((bp, 1))
    k = mhl.k
    windows = clique_window_labels(len(mhl.b_nodes), k)
    for i, b in enumerate(mhl.b_nodes):
        for j in windows[i]:
            hub = mhl.b_nodes[j]
            d = 0 if hub == b else 1
            forward[b].append((hub, d))
            reverse[b].append((hub, d))
    labeling = DirectedLabeling(forward, reverse)
    for v in range(n):
        for hub, d in labeling.forward[v]:
            if dist[v][hub] != d:
                raise InvariantViolation("constructed forward label stores a wrong distance")
        for hub, d in labeling.reverse[v]:
            if dist[hub][v] != d:
                raise InvariantViolation("constructed reverse label stores a wrong distance")
    return labeling


def _instance_triples(mhl: MHLInstance):
    """Recover the triples from the C -> U arcs, in C-node order."""
    out = []
    u_index = {u: x for x, u in enumerate(mhl.u_nodes)}
    by_c = {c: set() for c in mhl.c_nodes}
    for u, v, _ in mhl.graph.edges:
        if u in by_c and v in u_index:
            by_c[u].add(u_index[v])
    for c in mhl.c_nodes:
        out.append(frozenset(by_c[c]))
    return out


def verify_directed_cover(g: Graph, labeling: DirectedLabeling):
    """None when every finite ordered pair is covered, else the first violation.

    A hub covers (s, t) when it lies on some shortest s-to-t path, i.e.
    dist(s,x) + dist(x,t) equals dist(s,t); stored distances are checked
    against the oracle first.
    """
    if labeling.node_count != g.node_count:
        raise InvariantViolation("labeling size does not match the graph")
    n = g.node_count
    dist = [_distances(g, s) for s in range(n)]
    for v in range(n):
        for hub, d in labeling.forward[v]:
            if dist[v][hub] != d:
                raise InvariantViolation(f"forward label of {v}: stored {d} to {hub}, oracle {dist[v][hub]}")
        for hub, d in labeling.reverse[v]:
            if dist[hub][v] != d:
                raise InvariantViolation(f"reverse label of {v}: stored {d} from {hub}, oracle {dist[hub][v]}")
    for s in range(n):
        for t in range(n):
            if s == t or dist[s][t] is None:
                continue
            ok = False
            for hub, ds in labeling.forward[s]:
                dt = dist[hub][t]
                if dt is not None:
                    for h2, d2 in labeling.reverse[t]:
                        if h2 == hub and ds + d2 == dist[s][t]:
                            ok = True
                            break
                if ok:
                    break
            if not ok:
                return (s, t)
    return None


def exact_mhl_decide(g: Graph, k: int, max_nodes: int = 20, max_pairs: int = 120):
    """Is there a labeling with every label size at most k?

    Complete branch and bound over per-pair hub choices with bitmask
    labels: always branch on the uncovered pair with the fewest viable
    hubs, where a hub is viable if adding it keeps both touched labels
    within budget.  Self-pairs are left unconstrained.  Returns
    (True, DirectedLabeling) or (False, None); within the caps a "no"
    is the result of exhausting the whole space.
    """
    n = g.node_count
    if n > max_nodes:
        raise CapExceeded(f"decider cap: {n} nodes > {max_nodes}")
    dist = [_distances(g, s) for s in range(n)]
    pairs = []
    for s in range(n):
        for t in range(n):
            if s == t or dist[s][t] is None:
                continue
            mask = 0
            for x in range(n):
                if dist[s][x] is not None and dist[x][t] is not None and dist[s][x] + dist[x][t] == dist[s][t]:
                    mask |= 1 << x
            pairs.append((s, t, mask))
    if len(pairs) > max_pairs:
        raise CapExceeded(f"decider cap: {len(pairs)} reachable pairs > {max_pairs}")
    # Static order: fewest hub candidates first, then highest ids; ties in
    # the dynamic selection below resolve to this order, which keeps the
    # search working on one neighbourhood of the graph at a time.
    pairs.sort(key=lambda p: (p[2].bit_count(), -p[0], -p[1]))
    if k <= 0:
        return (False, None) if pairs else (True, DirectedLabeling([()] * n, [()] * n))

    full = (1 << n) - 1
    forward = [0] * n
    reverse = [0] * n
    fsize = [0] * n
    rsize = [0] * n
    # Failed label states; the labels alone determine the residual
    # problem, so different assignment orders share subtree outcomes.
    failed: set[int] = set()
    cache_cap = 400_000
    width = n

    def pack():
        state = 0
        for v in range(n):
            state = (state << width) | forward[v]
        for v in range(n):
            state = (state << width) | reverse[v]
        return state

    def solve():
        key = pack()
        if key in failed:
            return False
        best_count = None
        best_idx = -1
        best_viable = 0
        for i, (s, t, mask) in enumerate(pairs):
            fr = forward[s]
            rv = reverse[t]
            if fr & rv & mask:
                continue
            viable = mask & (fr if fsize[s] >= k else full) & (rv if rsize[t] >= k else full)
            if not viable:
                if len(failed) < cache_cap:
                    failed.add(key)
                return False
            c = viable.bit_count()
            if best_count is None or c < best_count:
                best_count = c
                best_idx = i
                best_viable = viable
                if c == 1:
                    break
        if best_count is None:
            return True
        s, t, _ = pairs[best_idx]
        cands = []
        bits = best_viable
        while bits:
            low = bits & -bits
            x = low.bit_length() - 1
            bits ^= low
            cost = (0 if forward[s] >> x & 1 else 1) + (0 if reverse[t] >> x & 1 else 1)
            cands.append((cost, x))
        for _, x in sorted(cands):
            bit = 1 << x
            added_f = not (forward[s] & bit)
            added_r = not (reverse[t] & bit)
            if added_f:
                forward[s] |= bit
                fsize[s] += 1
            if added_r:
                reverse[t] |= bit
                rsize[t] += 1
            if solve():
                return True
            if added_f:
                forward[s] ^= bit
                fsize[s] -= 1
            if added_r:
                reverse[t] ^= bit
                rsize[t] -= 1
        if len(failed) < cache_cap:
            failed.add(key)
        return False

    if not solve():
        return False, None
    fwd_labels = []
    rev_labels = []
    for v in range(n):
        fwd_labels.append([(x, dist[v][x]) for x in range(n) if forward[v] >> x & 1])
        rev_labels.append([(x, dist[x][v]) for x in range(n) if reverse[v] >> x & 1])
    return True, DirectedLabeling(fwd_labels, rev_labels)
