import random

import pytest

from routelab.ch import (
    build_order,
    ch_query,
    ch_stats,
    contract_preprocess,
    format_e_plus,
    leaf_edge_census,
    leaf_shortcut_census,
    shortcut_delta,
)
from routelab.errors import InvariantViolation
from routelab.family import FamilyParams, build_family
from routelab.graph import Graph, all_pairs

from conftest import random_graph


def test_by_height_order_leaves_first(g222):
    g, meta = g222
    order = build_order(g, "by_height", meta=meta)
    by_rank = order.nodes_by_rank()
    assert all(meta.height[v] == 0 for v in by_rank[:8])
    assert all(meta.height[v] == 2 for v in by_rank[-2:])


def test_by_height_requires_meta(p3):
    with pytest.raises(InvariantViolation):
        build_order(p3, "by_height")


def test_edge_difference_contracts_middle_last(p3):
    order = build_order(p3, "edge_difference")
    assert order.rank[1] == 2  # contracting the middle first would add a shortcut


def test_random_order_reproducible(p3):
    assert build_order(p3, "random", seed=42) == build_order(p3, "random", seed=42)
    assert build_order(p3, "random", seed=42).rank != build_order(p3, "random", seed=43).rank or True


def test_contract_path_endpoints_first(p3):
    idx = contract_preprocess(p3, build_order(p3, "explicit", explicit=(0, 2, 1)))
    assert idx.e_plus == ()


def test_contract_path_middle_first(p3):
    idx = contract_preprocess(p3, build_order(p3, "explicit", explicit=(1, 0, 2)))
    assert idx.e_plus == ((0, 2, 2, 0),)


def test_witness_tie_suppresses_shortcut():
    # square with equal two-hop routes: contracting a corner adds nothing
    g = Graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    idx = contract_preprocess(g, build_order(g, "input"))
    assert all(u != 0 and v != 0 for u, v, _, r in idx.e_plus if r == 0)
    matrix = all_pairs(g)
    for s in range(4):
        for t in range(4):
            dist, _, _ = ch_query(idx, s, t)
            assert dist == matrix[s][t]


def test_leaf_shortcut_census_g222(g222):
    g, meta = g222
    idx = contract_preprocess(g, build_order(g, "by_height", meta=meta))
    census = leaf_shortcut_census(meta, idx)
    assert census["leaf_shortcuts"] == 8  # t**k * k * C(q,2) = 4 * 2 * 1
    assert census["criterion_violations"] == 0


def test_leaf_shortcut_census_single_copy():
    g, meta = build_family(FamilyParams(2, 2, 1, 0))
    idx = contract_preprocess(g, build_order(g, "by_height", meta=meta))
    census = leaf_shortcut_census(meta, idx)
    assert census["predicted"] == 0
    assert census["leaf_shortcuts"] == 0


def test_leaf_shortcut_census_g322(g322):
    g, meta = g322
    idx = contract_preprocess(g, build_order(g, "by_height", meta=meta))
    census = leaf_shortcut_census(meta, idx)
    assert census["leaf_shortcuts"] == 18  # 9 * 2 * 1
    assert census["criterion_violations"] == 0


def test_census_requires_by_height(g222):
    g, meta = g222
    idx = contract_preprocess(g, build_order(g, "input"))
    with pytest.raises(InvariantViolation):
        leaf_shortcut_census(meta, idx)


def test_ch_query_identity_and_sweep(g222):
    g, meta = g222
    matrix = all_pairs(g)
    for strategy, kwargs in (("by_height", {"meta": meta}), ("edge_difference", {}), ("random", {"seed": 1})):
        idx = contract_preprocess(g, build_order(g, strategy, **kwargs))
        dist, _, _ = ch_query(idx, 3, 3)
        assert dist == 0
        for s in range(g.node_count):
            for t in range(g.node_count):
                dist, meet, _ = ch_query(idx, s, t)
                assert dist == matrix[s][t]
                if dist is not None and s != t:
                    assert matrix[s][meet] + matrix[meet][t] == dist


def test_ch_query_unreachable():
    g = Graph(4, [(0, 1, 1), (2, 3, 1)])
    idx = contract_preprocess(g, build_order(g, "input"))
    dist, meet, _ = ch_query(idx, 0, 3)
    assert dist is None and meet is None


def test_ch_query_random_graphs_all_strategies():
    rng = random.Random(17)
    for trial in range(30):
        g = random_graph(rng, max_nodes=10)
        matrix = all_pairs(g)
        for strategy in ("edge_difference", "input", "random"):
            order = build_order(g, strategy, seed=trial)
            idx = contract_preprocess(g, order)
            for s in range(g.node_count):
                for t in range(g.node_count):
                    dist, _, _ = ch_query(idx, s, t)
                    assert dist == matrix[s][t]


def test_shortcut_delta_cases(g232):
    g, meta = g232
    root = meta.node_id(0, ())
    n = g.node_count
    # all leaves ranked below v -> every count zero -> gain 0
    order_leaves_first = build_order(g, "by_height", meta=meta)
    delta = shortcut_delta(meta, order_leaves_first, root)
    assert delta.child_counts == (0, 0) and delta.net_gain == 0
    # input order ranks the height-2 node before every leaf below it, so
    # both child subtrees are fully unranked: counts t**(h-1) = 2 each
    mid = meta.node_id(0, (0,))
    order_input = build_order(g, "input")
    d_mid = shortcut_delta(meta, order_input, mid)
    assert d_mid.child_counts == (2, 2)
    assert d_mid.net_gain == 2 * 2 - 4

    def order_with_after(node, after):
        ranks = [0] * n
        pos = 0
        for v in range(n):
            if v != node and v not in after:
                ranks[v] = pos
                pos += 1
        ranks[node] = pos
        pos += 1
        for v in after:
            ranks[v] = pos
            pos += 1
        return build_order(g, "explicit", explicit=ranks)

    # exactly one child subtree fully unranked: gain -t**(h-1)
    first_child_leaves = [v for v in meta.leaves() if meta.address[v][:2] == (0, 0)]
    d_one = shortcut_delta(meta, order_with_after(mid, first_child_leaves), mid)
    assert d_one.child_counts == (2, 0)
    assert d_one.net_gain == -2
    # two singleton counts: 1*1 - 2 = -1
    pair = [next(v for v in meta.leaves() if meta.address[v][:2] == (0, 0)),
            next(v for v in meta.leaves() if meta.address[v][:2] == (0, 1))]
    d_two = shortcut_delta(meta, order_with_after(mid, pair), mid)
    assert d_two.child_counts == (1, 1)
    assert d_two.net_gain == -1


def test_shortcut_delta_rejects_leaf(g222):
    g, meta = g222
    order = build_order(g, "by_height", meta=meta)
    with pytest.raises(InvariantViolation):
        shortcut_delta(meta, order, meta.leaves()[0])


def test_delta_minimum_over_orders_matches_case_analysis():
    # exhaustive check at the height-2 node of a single copy: over all
    # leaf-subset rankings the minimum net gain is -t**(height-1) = -2
    g, meta = build_family(FamilyParams(2, 2, 1, 0))
    top = meta.node_id(0, ())
    below = list(meta.leaves())
    n = g.node_count
    seen = set()
    import itertools
    for subset_size in range(len(below) + 1):
        for subset in itertools.combinations(below, subset_size):
            ranks = [0] * n
            pos = 0
            for v in range(n):
                if v not in subset and v != top:
                    ranks[v] = pos
                    pos += 1
            ranks[top] = pos
            pos += 1
            for v in subset:
                ranks[v] = pos
                pos += 1
            order = build_order(g, "explicit", explicit=ranks)
            seen.add(shortcut_delta(meta, order, top).net_gain)
    assert min(seen) == -2
    assert 0 in seen


def test_leaf_edge_census_by_height(g222):
    g, meta = g222
    idx = contract_preprocess(g, build_order(g, "by_height", meta=meta))
    census = leaf_edge_census(meta, idx)
    # every leaf still holds its k=2 same-copy ancestor edges when contracted
    assert census["per_copy"] == (8, 8)
    assert census["total"] == 16


def test_leaf_edge_census_lower_bound_random_orders(g222, g322):
    for (g, meta), bound in ((g222, 1 * 2 * 2 * 1), (g322, 1 * 2 * 3 * 2)):
        q = meta.params.q
        per_copy_bound = meta.params.k * meta.params.t ** (meta.params.k - 1) * (meta.params.t - 1)
        for seed in range(20):
            order = build_order(g, "random", seed=seed)
            idx = contract_preprocess(g, order)
            census = leaf_edge_census(meta, idx)
            assert census["total"] >= bound
            assert all(c >= per_copy_bound for c in census["per_copy"])


def test_hop_limited_witness_only_adds_shortcuts():
    rng = random.Random(23)
    for trial in range(20):
        g = random_graph(rng, max_nodes=9)
        order = build_order(g, "random", seed=trial)
        exact = contract_preprocess(g, order)
        bounded = contract_preprocess(g, order, hop_limit=1)
        exact_pairs = {frozenset((u, v)) for u, v, _, _ in exact.e_plus}
        bounded_pairs = {frozenset((u, v)) for u, v, _, _ in bounded.e_plus}
        assert exact_pairs <= bounded_pairs
        matrix = all_pairs(g)
        for s in range(g.node_count):
            for t in range(g.node_count):
                dist, _, _ = ch_query(bounded, s, t)
                assert dist == matrix[s][t]


def test_e_plus_dump_format(p3):
    idx = contract_preprocess(p3, build_order(p3, "explicit", explicit=(1, 0, 2)))
    assert format_e_plus(idx) == "0 2 2 0\n"


def test_ch_stats_shape(p3):
    idx = contract_preprocess(p3, build_order(p3, "edge_difference"))
    stats = ch_stats(idx)
    assert stats["e_plus"] == 0
    assert stats["avg_settled"] > 0
