"""Command-line front end.

Thin wrappers over the library: parse arguments, call one operation,
serialize the result.  Exit codes: 0 success, 2 cap refusal (and usage
errors), 1 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import CapExceeded, InvariantViolation
from . import bench as _bench
from . import ch as _ch
from . import family as _family
from . import graph as _graph
from . import highway as _hw
from . import hublabel as _hl
from . import mhl as _mhl
from . import tnr as _tnr


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _emit(payload, args):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(parser, caps=True):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    if caps:
        parser.add_argument("--max-nodes", type=int, default=5000)


def _family_args(parser):
    parser.add_argument("--t", type=int, required=True)
    parser.add_argument("--k", type=int, required=True)
    parser.add_argument("--q", type=int, required=True)
    parser.add_argument("--scale-exponent", type=int, default=None)


def _build_from_args(args):
    scale = args.scale_exponent
    if scale is None:
        scale = args.k + 1 if args.q >= 2 else 0
    params = _family.FamilyParams(args.t, args.k, args.q, scale)
    return _family.build_family(params)


def _order_from_args(g, args, meta=None):
    return _ch.build_order(g, args.order, meta=meta, seed=args.seed)


def _load_meta_if(args):
    return _family.load_meta(args.meta) if getattr(args, "meta", None) else None


def main(argv=None) -> int:
    parser = _Parser(prog="routelab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a family instance")
    _family_args(p)
    _add_common(p)
    p.add_argument("--meta", default=None, help="metadata sidecar path")

    p = sub.add_parser("stats", help="graph statistics incl. diameter")
    p.add_argument("--graph", required=True)
    _add_common(p)

    p = sub.add_parser("hd", help="highway dimension sweep")
    p.add_argument("--graph", required=True)
    p.add_argument("--definition", choices=_hw.DEFINITIONS, default="classic")
    p.add_argument("--max-path-sets", type=int, default=64)
    p.add_argument("--upper-only", action="store_true",
                   help="greedy sweep only; reports h_upper, never exact")
    _add_common(p)

    p_hl = sub.add_parser("hl", help="hub labeling operations")
    hl_sub = p_hl.add_subparsers(dest="hl_command", required=True)

    p = hl_sub.add_parser("build")
    p.add_argument("--graph", required=True)
    p.add_argument("--meta", default=None)
    p.add_argument("--constructor", choices=("structural", "ch"), default="structural")
    p.add_argument("--order", choices=_ch.STRATEGIES, default="edge_difference")
    p.add_argument("--stats", dest="stats_out", default=None)
    _add_common(p)

    p = hl_sub.add_parser("query")
    p.add_argument("--labels", required=True)
    p.add_argument("-s", type=int, required=True)
    p.add_argument("-t", type=int, required=True)
    _add_common(p)

    p = hl_sub.add_parser("census")
    _family_args(p)
    _add_common(p)

    p = hl_sub.add_parser("opt")
    p.add_argument("--graph", required=True)
    p.add_argument("--cap", type=int, default=8)
    _add_common(p)

    p_ch = sub.add_parser("ch", help="contraction hierarchy operations")
    ch_sub = p_ch.add_subparsers(dest="ch_command", required=True)

    p = ch_sub.add_parser("build")
    p.add_argument("--graph", required=True)
    p.add_argument("--meta", default=None)
    p.add_argument("--order", choices=_ch.STRATEGIES, default="edge_difference")
    p.add_argument("--hop-limit", type=int, default=None,
                   help="bounded witness search (adds shortcuts, keeps distances)")
    p.add_argument("--stats", dest="stats_out", default=None)
    _add_common(p)

    p = ch_sub.add_parser("query")
    p.add_argument("--graph", required=True)
    p.add_argument("--meta", default=None)
    p.add_argument("--order", choices=_ch.STRATEGIES, default="edge_difference")
    p.add_argument("--hop-limit", type=int, default=None)
    p.add_argument("-s", type=int, required=True)
    p.add_argument("-t", type=int, required=True)
    _add_common(p)

    p = ch_sub.add_parser("census")
    _family_args(p)
    _add_common(p)

    p_tnr = sub.add_parser("tnr", help="transit node routing operations")
    tnr_sub = p_tnr.add_subparsers(dest="tnr_command", required=True)

    p = tnr_sub.add_parser("build")
    p.add_argument("--graph", required=True)
    p.add_argument("--meta", default=None)
    p.add_argument("--order", choices=_ch.STRATEGIES, default="edge_difference")
    p.add_argument("--transit-size", type=int, default=None)
    _add_common(p)

    p = tnr_sub.add_parser("query")
    p.add_argument("--graph", required=True)
    p.add_argument("--meta", default=None)
    p.add_argument("--order", choices=_ch.STRATEGIES, default="edge_difference")
    p.add_argument("--transit-size", type=int, default=None)
    p.add_argument("-s", type=int, required=True)
    p.add_argument("-t", type=int, required=True)
    _add_common(p)

    p = tnr_sub.add_parser("census")
    _family_args(p)
    p.add_argument("--transit-size", type=int, default=None)
    _add_common(p)

    p_x3c = sub.add_parser("x3c", help="exact cover and the hardness reduction")
    x3c_sub = p_x3c.add_subparsers(dest="x3c_command", required=True)

    p = x3c_sub.add_parser("solve")
    p.add_argument("--inst", required=True)
    _add_common(p)

    p = x3c_sub.add_parser("reduce")
    p.add_argument("--inst", required=True)
    p.add_argument("--out-graph", required=True)
    p.add_argument("--out-tags", required=True)
    _add_common(p)

    p = x3c_sub.add_parser("decide")
    p.add_argument("--inst", required=True)
    p.add_argument("--k", type=int, default=None, help="defaults to |U|/3 + 1")
    p.add_argument("--mhl-max-nodes", type=int, default=20)
    p.add_argument("--mhl-max-pairs", type=int, default=120)
    p.add_argument("--cert", default=None, help="certificate JSON path")
    _add_common(p)

    p_bench = sub.add_parser("bench", help="experiment grid and slope fits")
    bench_sub = p_bench.add_subparsers(dest="bench_command", required=True)

    p = bench_sub.add_parser("run")
    p.add_argument("--t", default="2")
    p.add_argument("--k", default="2,3,4")
    p.add_argument("--q", default="2,4,8")
    p.add_argument("--transit-policy", choices=("copies", "sqrt"), default="copies")
    p.add_argument("--hd-max-nodes", type=int, default=14)
    p.add_argument("--max-cell-nodes", type=int, default=10_000)
    p.add_argument("--max-pair-sweep", type=int, default=2_000_000)
    _add_common(p, caps=False)

    p = bench_sub.add_parser("fit")
    p.add_argument("--rows", required=True)
    p.add_argument("--metric", required=True)
    p.add_argument("--x", choices=sorted(_bench.X_EXPRESSIONS), required=True)
    _add_common(p, caps=False)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except CapExceeded as exc:
        print(f"cap refused: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "gen":
        g, meta = _build_from_args(args)
        out = args.out or "instance.gr"
        _graph.save_graph(g, out)
        if args.meta:
            with open(args.meta, "w", encoding="utf-8") as fh:
                fh.write(meta.to_json())
        print(f"wrote {out} ({g.node_count} nodes, {g.edge_count} edges)")
        return 0
    if cmd == "stats":
        g = _graph.load_graph(args.graph)
        stats = _graph.graph_stats(g, max_nodes=args.max_nodes)
        _emit({
            "node_count": stats.node_count,
            "edge_count": stats.edge_count,
            "max_degree": stats.max_degree,
            "diameter": stats.diameter,
        }, args)
        return 0
    if cmd == "hd":
        g = _graph.load_graph(args.graph)
        if args.upper_only:
            upper = _hw.highway_dimension_upper(g, args.definition, max_nodes=args.max_nodes)
            _emit({"definition": args.definition, "h_upper": upper}, args)
            return 0
        result = _hw.highway_dimension(g, args.definition, max_nodes=args.max_nodes,
                                       max_path_sets=args.max_path_sets)
        radius, center, hitting = result.witness
        _emit({
            "definition": result.definition,
            "h": result.h,
            "witness": {"r": radius, "v": center, "set": sorted(hitting)},
        }, args)
        return 0
    if cmd == "hl":
        return _dispatch_hl(args)
    if cmd == "ch":
        return _dispatch_ch(args)
    if cmd == "tnr":
        return _dispatch_tnr(args)
    if cmd == "x3c":
        return _dispatch_x3c(args)
    if cmd == "bench":
        return _dispatch_bench(args)
    raise InvariantViolation(f"unknown command {cmd!r}")


def _dispatch_hl(args) -> int:
    if args.hl_command == "build":
        g = _graph.load_graph(args.graph)
        if args.constructor == "structural":
            meta = _load_meta_if(args)
            if meta is None:
                raise InvariantViolation("structural labeling requires --meta")
            labeling = _hl.structural_labeling(g, meta)
        else:
            order = _order_from_args(g, args, meta=_load_meta_if(args))
            labeling = _hl.ch_labeling(g, _ch.contract_preprocess(g, order))
        violation = _hl.verify_cover(g, labeling, max_nodes=args.max_nodes)
        if violation is not None:
            raise InvariantViolation(f"cover property fails for pair {violation}")
        text = _hl.format_labels(labeling)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.stats_out:
            with open(args.stats_out, "w", encoding="utf-8") as fh:
                json.dump(_hl.label_stats(labeling), fh, indent=2, sort_keys=True)
        return 0
    if args.hl_command == "query":
        with open(args.labels, encoding="utf-8") as fh:
            labeling = _hl.parse_labels(fh.read())
        dist, hub, comparisons = _hl.hl_query(labeling, args.s, args.t)
        _emit({"distance": dist, "hub": hub, "comparisons": comparisons}, args)
        return 0
    if args.hl_command == "census":
        _, meta = _build_from_args(args)
        census = _hl.path_class_census(meta)
        _emit({
            "classes": [
                {"lca_height": c.lca_height, "enumerated": c.enumerated, "formula": c.formula}
                for c in census.classes
            ],
            "consistent": census.consistent,
        }, args)
        if not census.consistent:
            raise InvariantViolation("path-class census mismatch")
        return 0
    if args.hl_command == "opt":
        g = _graph.load_graph(args.graph)
        labeling, total = _hl.exact_min_total_labeling(g, max_nodes=args.cap)
        _emit({"total": total, "labels": _hl.format_labels(labeling).splitlines()}, args)
        return 0
    raise InvariantViolation("unknown hl subcommand")


def _dispatch_ch(args) -> int:
    if args.ch_command == "build":
        g = _graph.load_graph(args.graph)
        order = _order_from_args(g, args, meta=_load_meta_if(args))
        idx = _ch.contract_preprocess(g, order, hop_limit=args.hop_limit)
        text = _ch.format_e_plus(idx)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.stats_out:
            meta = _load_meta_if(args)
            stats = _ch.ch_stats(idx) if g.node_count <= 200 else {"e_plus": len(idx.e_plus)}
            if meta is not None and order.strategy == "by_height":
                stats["leaf_shortcuts"] = _ch.leaf_shortcut_census(meta, idx)["leaf_shortcuts"]
            with open(args.stats_out, "w", encoding="utf-8") as fh:
                json.dump(stats, fh, indent=2, sort_keys=True)
        return 0
    if args.ch_command == "query":
        g = _graph.load_graph(args.graph)
        order = _order_from_args(g, args, meta=_load_meta_if(args))
        idx = _ch.contract_preprocess(g, order, hop_limit=args.hop_limit)
        dist, meet, stats = _ch.ch_query(idx, args.s, args.t)
        _emit({"distance": dist, "meeting_node": meet,
               "settled": stats.settled, "relaxed": stats.relaxed}, args)
        return 0
    if args.ch_command == "census":
        g, meta = _build_from_args(args)
        order = _ch.build_order(g, "by_height", meta=meta)
        idx = _ch.contract_preprocess(g, order)
        _emit(_ch.leaf_shortcut_census(meta, idx), args)
        return 0
    raise InvariantViolation("unknown ch subcommand")


def _dispatch_tnr(args) -> int:
    if args.tnr_command in ("build", "query"):
        g = _graph.load_graph(args.graph)
        order = _order_from_args(g, args, meta=_load_meta_if(args))
        idx = _ch.contract_preprocess(g, order)
        index = _tnr.build_tnr(idx, transit_size=args.transit_size)
        if args.tnr_command == "build":
            payload = {
                "transit": list(index.transit),
                "transit_size": index.transit_size,
                "access_dump": _tnr.format_access(index).splitlines(),
            }
            if index.transit_size ** 2 <= 1_000_000:
                payload["table"] = [list(row) for row in index.table]
            _emit(payload, args)
            return 0
        dist, stats = _tnr.tnr_query(index, args.s, args.t)
        _emit({
            "distance": dist,
            "classified": stats.classified,
            "access_pairs": stats.access_pairs,
            "fallback_settled": stats.fallback_settled,
        }, args)
        return 0
    if args.tnr_command == "census":
        g, meta = _build_from_args(args)
        order = _ch.build_order(g, "by_height", meta=meta)
        idx = _ch.contract_preprocess(g, order)
        index = _tnr.build_tnr(idx, transit_size=args.transit_size)
        payload = dict(_tnr.regular_census(meta, index))
        payload.update(_tnr.access_stats(index))
        _emit(payload, args)
        return 0
    raise InvariantViolation("unknown tnr subcommand")


def _dispatch_x3c(args) -> int:
    with open(args.inst, encoding="utf-8") as fh:
        inst = _mhl.parse_x3c(fh.read())
    if args.x3c_command == "solve":
        cover = _mhl.x3c_solve(inst)
        _emit({"cover": None if cover is None else [sorted(tri) for tri in cover]}, args)
        return 0
    if args.x3c_command == "reduce":
        reduced = _mhl.reduce_x3c_to_mhl(inst)
        _graph.save_graph(reduced.graph, args.out_graph)
        with open(args.out_tags, "w", encoding="utf-8") as fh:
            json.dump({"k": reduced.k, "tags": {str(v): tag for v, tag in sorted(reduced.tags().items())}},
                      fh, indent=2, sort_keys=True)
        print(f"wrote {args.out_graph} and {args.out_tags}")
        return 0
    if args.x3c_command == "decide":
        reduced = _mhl.reduce_x3c_to_mhl(inst)
        k = args.k if args.k is not None else reduced.k
        answer, labeling = _mhl.exact_mhl_decide(reduced.graph, k,
                                                 max_nodes=args.mhl_max_nodes,
                                                 max_pairs=args.mhl_max_pairs)
        payload = {"k": k, "answer": "yes" if answer else "no"}
        if answer and args.cert:
            with open(args.cert, "w", encoding="utf-8") as fh:
                json.dump({
                    "forward": [list(map(list, lbl)) for lbl in labeling.forward],
                    "reverse": [list(map(list, lbl)) for lbl in labeling.reverse],
                }, fh, indent=2, sort_keys=True)
        _emit(payload, args)
        return 0
    raise InvariantViolation("unknown x3c subcommand")


def _parse_int_list(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _dispatch_bench(args) -> int:
    if args.bench_command == "run":
        grid = tuple((t, k, q)
                     for t in _parse_int_list(args.t)
                     for k in _parse_int_list(args.k)
                     for q in _parse_int_list(args.q))
        rows = _bench.run_experiment(grid, seed=args.seed, transit_policy=args.transit_policy,
                                     hd_max_nodes=args.hd_max_nodes,
                                     max_cell_nodes=args.max_cell_nodes,
                                     max_pair_sweep=args.max_pair_sweep,
                                     log=lambda msg: print(msg, file=sys.stderr))
        if args.format == "csv":
            text = _bench.rows_to_csv(rows)
        else:
            text = json.dumps([{col: getattr(r, col) for col in _bench.CSV_COLUMNS} for r in rows],
                              indent=2, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if args.bench_command == "fit":
        with open(args.rows, encoding="utf-8") as fh:
            rows = _bench.rows_from_csv(fh.read())
        fit = _bench.fit_slopes(rows, args.metric, args.x)
        _emit({"x": fit.x_expr, "slope": fit.slope, "intercept": fit.intercept,
               "residual": fit.residual, "metric": args.metric}, args)
        return 0
    raise InvariantViolation("unknown bench subcommand")


if __name__ == "__main__":
    sys.exit(main())
