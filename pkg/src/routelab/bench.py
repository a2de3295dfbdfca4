"""Experiment grid over the family plus log-log slope fitting.

Every metric is a machine-independent counter or an exact ratio, so an
identical invocation (including seeds) produces byte-identical output.
Wall-clock never enters the rows.  Each row re-checks the counting
identities (leaf shortcuts, path-class census, label totals) before it
is emitted.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields

from .errors import CapExceeded, InvariantViolation
from .family import FamilyParams, build_family
from . import ch as _ch
from . import hublabel as _hl
from . import tnr as _tnr
from . import highway as _hw

CSV_COLUMNS = (
    "t", "k", "q", "n", "scale_exponent", "seed",
    "hl_total", "hl_total_per_node",
    "ch_e_plus", "ch_e_plus_per_node", "ch_e_plus_edge_difference",
    "leaf_shortcuts", "ch_avg_work",
    "tnr_transit_size", "tnr_avg_access_pairs", "tnr_global_fraction", "tnr_regular_fraction",
    "hd_classic",
)


@dataclass(frozen=True)
class ExperimentRow:
    t: int
    k: int
    q: int
    n: int
    scale_exponent: int
    seed: int
    hl_total: int
    hl_total_per_node: float
    ch_e_plus: int
    ch_e_plus_per_node: float
    ch_e_plus_edge_difference: int
    leaf_shortcuts: int
    ch_avg_work: float
    tnr_transit_size: int
    tnr_avg_access_pairs: float
    tnr_global_fraction: float
    tnr_regular_fraction: float
    hd_classic: int | None


@dataclass(frozen=True)
class SlopeFit:
    x_expr: str
    slope: float
    intercept: float
    residual: float


def default_grid():
    return tuple((2, k, q) for k in (2, 3, 4) for q in (2, 4, 8))


def run_experiment(grid=None, *, seed: int = 0, transit_policy: str = "copies",
                   hd_max_nodes: int = 14, hd_max_path_sets: int = 4096,
                   max_cell_nodes: int = 10_000, max_pair_sweep: int = 2_000_000,
                   log=None):
    """One ExperimentRow per grid cell, in sorted (t, k, q) order.

    transit_policy "copies" sizes the transit set as the q copy roots
    (the top of every by-height ranking), keeping the access-node count
    proportional to the quantity the access-pair metric tracks; "sqrt"
    uses ceil(sqrt(n)).  Cells that exceed a cap are skipped with a
    reason sent to ``log``.
    """
    if grid is None:
        grid = default_grid()
    rows = []
    for t, k, q in sorted(grid):
        try:
            rows.append(_run_cell(t, k, q, seed=seed, transit_policy=transit_policy,
                                   hd_max_nodes=hd_max_nodes, hd_max_path_sets=hd_max_path_sets,
                                   max_cell_nodes=max_cell_nodes, max_pair_sweep=max_pair_sweep))
        except CapExceeded as exc:
            if log is not None:
                log(f"cell t={t} k={k} q={q} skipped: {exc}")
    return tuple(rows)


def _run_cell(t, k, q, *, seed, transit_policy, hd_max_nodes, hd_max_path_sets,
              max_cell_nodes, max_pair_sweep):
    params = FamilyParams(t, k, q, scale_exponent=k + 1)
    if params.node_count > max_cell_nodes:
        raise CapExceeded(f"cell has {params.node_count} nodes > {max_cell_nodes}")
    g, meta = build_family(params)
    leaves = meta.leaves()
    cross_pairs = [(s, u) for s in leaves for u in leaves if s != u and meta.copy[s] != meta.copy[u]]
    if len(cross_pairs) > max_pair_sweep:
        raise CapExceeded(f"cell sweeps {len(cross_pairs)} pairs > {max_pair_sweep}")

    labeling = _hl.structural_labeling(g, meta)
    stats = _hl.label_stats(labeling)
    expected_total = sum(q * (k - meta.height[v] + 1) for v in range(g.node_count))
    if stats["total"] != expected_total:
        raise InvariantViolation("structural label total disagrees with the size formula")
    census = _hl.path_class_census(meta)
    if not census.consistent:
        raise InvariantViolation("path-class census disagrees with its counting formula")

    order = _ch.build_order(g, "by_height", meta=meta)
    idx = _ch.contract_preprocess(g, order)
    shortcut_census = _ch.leaf_shortcut_census(meta, idx)
    expected_shortcuts = t ** k * k * (q * (q - 1) // 2)
    if shortcut_census["leaf_shortcuts"] != expected_shortcuts or shortcut_census["criterion_violations"]:
        raise InvariantViolation("leaf shortcut census disagrees with its counting formula")
    work = 0
    for s, u in cross_pairs:
        _, _, qstats = _ch.ch_query(idx, s, u)
        work += qstats.settled + qstats.relaxed
    avg_work = work / len(cross_pairs) if cross_pairs else 0.0

    ed_order = _ch.build_order(g, "edge_difference")
    ed_idx = _ch.contract_preprocess(g, ed_order)

    transit_size = q if transit_policy == "copies" else None
    tnr_index = _tnr.build_tnr(idx, transit_size=transit_size)
    global_pairs = 0
    access_products = 0
    regular = 0
    transit_set = set(tnr_index.transit)
    for s, u in cross_pairs:
        if _tnr.locality_filter(tnr_index, s, u) == "global":
            global_pairs += 1
            access_products += len(tnr_index.access[s]) * len(tnr_index.access[u])
            if s not in transit_set and u not in transit_set:
                regular += 1
    hd_value = None
    if g.node_count <= hd_max_nodes:
        hd_value = _hw.highway_dimension(g, "classic", max_path_sets=hd_max_path_sets).h

    return ExperimentRow(
        t=t, k=k, q=q, n=g.node_count, scale_exponent=params.scale_exponent, seed=seed,
        hl_total=stats["total"],
        hl_total_per_node=stats["total"] / g.node_count,
        ch_e_plus=len(idx.e_plus),
        ch_e_plus_per_node=len(idx.e_plus) / g.node_count,
        ch_e_plus_edge_difference=len(ed_idx.e_plus),
        leaf_shortcuts=shortcut_census["leaf_shortcuts"],
        ch_avg_work=avg_work,
        tnr_transit_size=tnr_index.transit_size,
        tnr_avg_access_pairs=access_products / global_pairs if global_pairs else 0.0,
        tnr_global_fraction=global_pairs / len(cross_pairs) if cross_pairs else 0.0,
        tnr_regular_fraction=regular / len(cross_pairs) if cross_pairs else 0.0,
        hd_classic=hd_value,
    )


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)  # shortest exact form: stable and round-trips
    return str(value)


def rows_to_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_format_value(getattr(row, col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split(",") != list(CSV_COLUMNS):
        raise InvariantViolation("unrecognized experiment CSV header")
    typed = {f.name: f.type for f in fields(ExperimentRow)}
    rows = []
    for ln in lines[1:]:
        values = ln.split(",")
        kwargs = {}
        for col, raw in zip(CSV_COLUMNS, values):
            if raw == "":
                kwargs[col] = None
            elif typed[col] in ("int", int):
                kwargs[col] = int(raw)
            elif typed[col] in ("float", float):
                kwargs[col] = float(raw)
            else:
                kwargs[col] = int(raw) if raw.lstrip("-").isdigit() else float(raw)
        rows.append(ExperimentRow(**kwargs))
    return tuple(rows)


X_EXPRESSIONS = {
    "qk": lambda row: row.q * row.k,
    "qk2": lambda row: (row.q * row.k) ** 2,
    "q2": lambda row: row.q ** 2,
    "q": lambda row: row.q,
    "k": lambda row: row.k,
    "n": lambda row: row.n,
}


def fit_slopes(rows, metric: str, x_expr: str) -> SlopeFit:
    """Ordinary least squares on (log x, log y) over the grid rows."""
    if x_expr not in X_EXPRESSIONS:
        raise InvariantViolation(f"unknown x expression {x_expr!r}")
    xs = []
    ys = []
    for row in rows:
        y = getattr(row, metric)
        x = X_EXPRESSIONS[x_expr](row)
        if y is None or y <= 0 or x <= 0:
            continue
        xs.append(math.log(x))
        ys.append(math.log(y))
    if len(xs) < 4:
        raise InvariantViolation(f"slope fit needs >= 4 positive rows, got {len(xs)}")
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    residual = math.sqrt(sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys)) / len(xs))
    return SlopeFit(x_expr, slope, intercept, residual)


def timed(fn, *args, **kwargs):
    """Run fn and return (result, wall seconds); informational only."""
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start
