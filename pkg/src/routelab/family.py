"""Adversarial graph family: linked copies of a complete tree.

The base instance is a complete t-ary tree of height k where every node
is joined to *each* of its proper ancestors w by an edge of length
16**(height(w) - 1).  The full instance takes q copies of that graph and
joins the q copies of every node v pairwise with edges of length
2**(height(v) - k - 1); switching copies is always cheap, and cheapest
near the leaves.  Cross edges are fractional before scaling, so every
length is multiplied by 2**scale_exponent with scale_exponent >= k + 1
whenever q >= 2 (the smallest cross edge has exponent -(k + 1)).

Node numbering is copy-major, then by height descending with ties broken
by address (root-to-node digit string) in lexicographic order, which
makes by-height contraction orders reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CapExceeded, InvariantViolation, LengthOverflow
from .graph import MAX_LENGTH, Graph, all_pairs


@dataclass(frozen=True)
class FamilyParams:
    """Family parameters: branching t, tree height k, copy count q.

    k = 1 and q = 1 are accepted as degenerate fixtures; the interesting
    instances have t, k >= 2 and q >= 2.
    """

    t: int
    k: int
    q: int
    scale_exponent: int = 0

    def __post_init__(self):
        if self.t < 2:
            raise InvariantViolation("branching t must be >= 2")
        if self.k < 1:
            raise InvariantViolation("height k must be >= 1")
        if self.q < 1:
            raise InvariantViolation("copy count q must be >= 1")
        if self.scale_exponent < 0:
            raise InvariantViolation("scale_exponent must be >= 0")
        if self.q >= 2 and self.scale_exponent < self.k + 1:
            raise InvariantViolation(
                "scale_exponent must be >= k+1 when q >= 2, otherwise the "
                "leaf-level cross edges are not integral"
            )

    @property
    def nodes_per_copy(self) -> int:
        return (self.t ** (self.k + 1) - 1) // (self.t - 1)

    @property
    def node_count(self) -> int:
        return self.q * self.nodes_per_copy


@dataclass(frozen=True)
class PathPrediction:
    """Predicted shortest-path candidates for one node pair.

    Each candidate is a vertex sequence of at most 4 nodes; ``switch_at``
    tags, per candidate, which endpoint changes copy ("s", "t", or None
    for a same-copy or single-edge route).
    """

    candidates: tuple[tuple[int, ...], ...]
    switch_at: tuple[str | None, ...]


class FamilyMeta:
    """Per-node copy index, height, and root address for one instance."""

    __slots__ = ("params", "copy", "height", "address", "_index")

    def __init__(self, params: FamilyParams):
        self.params = params
        t, k = params.t, params.k
        addresses = []
        for lam in range(k, -1, -1):
            level = _level_addresses(t, k - lam)
            addresses.extend(level)
        per_copy = params.nodes_per_copy
        if len(addresses) != per_copy:
            raise InvariantViolation("address enumeration does not match node formula")
        self.copy = tuple(c for c in range(params.q) for _ in range(per_copy))
        self.height = tuple(k - len(a) for _ in range(params.q) for a in addresses)
        self.address = tuple(a for _ in range(params.q) for a in addresses)
        self._index = {(c, a): c * per_copy + i for c in range(params.q) for i, a in enumerate(addresses)}

    @property
    def node_count(self) -> int:
        return self.params.node_count

    def node_id(self, copy: int, address: tuple[int, ...]) -> int:
        return self._index[(copy, tuple(address))]

    def is_leaf(self, v: int) -> bool:
        return self.height[v] == 0

    def leaves(self):
        return tuple(v for v in range(self.node_count) if self.height[v] == 0)

    def ancestors(self, v: int):
        """Proper ancestors of v within its own copy, nearest first."""
        c, addr = self.copy[v], self.address[v]
        return tuple(self.node_id(c, addr[:i]) for i in range(len(addr) - 1, -1, -1))

    def copies_of(self, v: int):
        """All q copies of v's underlying tree position, by copy index."""
        addr = self.address[v]
        return tuple(self.node_id(c, addr) for c in range(self.params.q))

    def lca_height(self, u: int, v: int) -> int:
        """Height of the lowest common ancestor of the tree positions.

        Copies are ignored; u and v are compared by address alone.
        """
        a, b = self.address[u], self.address[v]
        common = 0
        for x, y in zip(a, b):
            if x != y:
                break
            common += 1
        return self.params.k - common

    def to_json(self) -> str:
        payload = {
            "t": self.params.t,
            "k": self.params.k,
            "q": self.params.q,
            "scale_exponent": self.params.scale_exponent,
            "nodes": [
                {"id": v, "copy": self.copy[v], "height": self.height[v], "address": list(self.address[v])}
                for v in range(self.node_count)
            ],
        }
        return json.dumps(payload, indent=0, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FamilyMeta":
        payload = json.loads(text)
        params = FamilyParams(payload["t"], payload["k"], payload["q"], payload["scale_exponent"])
        meta = cls(params)
        for node in payload["nodes"]:
            v = node["id"]
            if (
                meta.copy[v] != node["copy"]
                or meta.height[v] != node["height"]
                or meta.address[v] != tuple(node["address"])
            ):
                raise InvariantViolation("metadata sidecar does not match canonical numbering")
        return meta


def _level_addresses(t: int, depth: int):
    """All addresses of a given depth in lexicographic order."""
    out = [()]
    for _ in range(depth):
        out = [a + (d,) for a in out for d in range(t)]
    return out


def tree_edge_length(ancestor_height: int, scale_exponent: int = 0) -> int:
    """Length of the edge from any descendant up to an ancestor at that height."""
    w = 16 ** (ancestor_height - 1) << scale_exponent
    if w > MAX_LENGTH:
        raise LengthOverflow("tree edge length exceeds 64-bit range")
    return w


def cross_edge_length(height: int, k: int, scale_exponent: int) -> int:
    """Length of the copy-switch edge at a node of the given height."""
    exp = height - k - 1 + scale_exponent
    if exp < 0:
        raise InvariantViolation("cross edge is not integral at this scale_exponent")
    w = 1 << exp
    if w > MAX_LENGTH:
        raise LengthOverflow("cross edge length exceeds 64-bit range")
    return w


def build_tree_graph(t: int, k: int):
    """Single copy: complete t-ary tree of height k plus all ancestor edges."""
    return build_family(FamilyParams(t, k, 1, 0))


def build_family(params: FamilyParams):
    """Build the full instance; returns (Graph, FamilyMeta).

    Tree edges come first (copy-major, child node id ascending, nearest
    ancestor first), then cross edges (underlying position ascending,
    copy pairs in lexicographic order).
    """
    meta = FamilyMeta(params)
    n = params.node_count
    if n > 50_000_000:
        raise CapExceeded("family instance would exceed the node-count cap")
    edges = []
    per_copy = params.nodes_per_copy
    for c in range(params.q):
        base = c * per_copy
        for v in range(base, base + per_copy):
            addr = meta.address[v]
            for i in range(len(addr) - 1, -1, -1):
                w_node = meta.node_id(c, addr[:i])
                edges.append((w_node, v, tree_edge_length(params.k - i, params.scale_exponent)))
    if params.q >= 2:
        for pos in range(per_copy):
            w = cross_edge_length(meta.height[pos], params.k, params.scale_exponent)
            for a in range(params.q):
                for b in range(a + 1, params.q):
                    edges.append((a * per_copy + pos, b * per_copy + pos, w))
    return Graph(n, edges, directed=False), meta


def predicted_shortest_paths(meta: FamilyMeta, s: int, t: int) -> PathPrediction:
    """Candidate shortest routes for a pair, from the closed-form analysis.

    Same copy: the unique route is s - w - t through the lowest common
    ancestor (collapsing w when it coincides with an endpoint).  Across
    copies: switch copies at s when height(s) <= height(t), and/or at t
    when height(t) <= height(s); equal heights tie with two candidates.
    """
    if s == t:
        raise InvariantViolation("prediction requires two distinct nodes")
    ca, cb = meta.copy[s], meta.copy[t]
    k = meta.params.k
    addr_s, addr_t = meta.address[s], meta.address[t]
    lam = meta.lca_height(s, t)
    lca_addr = addr_s[: k - lam]
    if ca == cb:
        w = meta.node_id(ca, lca_addr)
        return PathPrediction((_dedup((s, w, t)),), (None,))
    if addr_s == addr_t:
        return PathPrediction(((s, t),), (None,))
    hs, ht = meta.height[s], meta.height[t]
    cands = []
    tags = []
    if hs <= ht:
        s_other = meta.node_id(cb, addr_s)
        w_other = meta.node_id(cb, lca_addr)
        t_same = meta.node_id(cb, addr_t)
        cands.append(_dedup((s, s_other, w_other, t_same)))
        tags.append("s")
    if ht <= hs:
        w_same = meta.node_id(ca, lca_addr)
        t_same = meta.node_id(ca, addr_t)
        cands.append(_dedup((s, w_same, t_same, t)))
        tags.append("t")
    return PathPrediction(tuple(cands), tuple(tags))


def _dedup(seq):
    out = [seq[0]]
    for v in seq[1:]:
        if v != out[-1]:
            out.append(v)
    return tuple(out)


def path_length(g: Graph, seq) -> int:
    """Total length of a vertex sequence; errors if an edge is missing."""
    total = 0
    for a, b in zip(seq, seq[1:]):
        w_best = None
        for u, w, _ in g.adjacency[a]:
            if u == b and (w_best is None or w < w_best):
                w_best = w
        if w_best is None:
            raise InvariantViolation(f"no edge {a}-{b} on predicted route")
        total += w_best
    return total


def family_stats(g: Graph, meta: FamilyMeta, max_nodes: int = 5000):
    """Node/edge accounting plus the diameter when within the all-pairs cap."""
    params = meta.params
    if g.node_count != params.node_count:
        raise InvariantViolation("graph does not match the family node-count formula")
    cross = params.nodes_per_copy * (params.q * (params.q - 1) // 2) if params.q >= 2 else 0
    stats = {
        "node_count": g.node_count,
        "edge_count": g.edge_count,
        "cross_edge_count": cross,
        "diameter": None,
        "diameter_computed": False,
    }
    try:
        matrix = all_pairs(g, max_nodes=max_nodes)
    except CapExceeded:
        return stats
    diameter = 0
    for row in matrix:
        for d in row:
            if d is not None and d > diameter:
                diameter = d
    stats["diameter"] = diameter
    stats["diameter_computed"] = True
    return stats


def save_instance(g: Graph, meta: FamilyMeta, graph_path, meta_path):
    from .graph import save_graph

    save_graph(g, graph_path)
    with open(meta_path, "w", encoding="utf-8") as fh:
        fh.write(meta.to_json())


def load_meta(meta_path) -> FamilyMeta:
    with open(meta_path, encoding="utf-8") as fh:
        return FamilyMeta.from_json(fh.read())
