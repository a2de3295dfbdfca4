import pytest

from routelab.bench import (
    ExperimentRow,
    fit_slopes,
    rows_from_csv,
    rows_to_csv,
    run_experiment,
)
from routelab.errors import InvariantViolation


def _row(t, k, q, **overrides):
    base = dict(
        t=t, k=k, q=q, n=q * (2 ** (k + 1) - 1), scale_exponent=k + 1, seed=0,
        hl_total=0, hl_total_per_node=1.0,
        ch_e_plus=0, ch_e_plus_per_node=1.0, ch_e_plus_edge_difference=0,
        leaf_shortcuts=0, ch_avg_work=1.0,
        tnr_transit_size=q, tnr_avg_access_pairs=1.0,
        tnr_global_fraction=0.5, tnr_regular_fraction=0.5,
        hd_classic=None,
    )
    base.update(overrides)
    return ExperimentRow(**base)


def test_fit_linear_is_exact():
    rows = [_row(2, 2, q, ch_avg_work=float(q * 2)) for q in (2, 3, 4, 5)]
    fit = fit_slopes(rows, "ch_avg_work", "qk")
    assert fit.slope == pytest.approx(1.0, abs=1e-9)
    assert fit.residual == pytest.approx(0.0, abs=1e-9)


def test_fit_quadratic_is_exact():
    rows = [_row(2, 2, q, ch_avg_work=float((q * 2) ** 2)) for q in (2, 3, 4, 5)]
    fit = fit_slopes(rows, "ch_avg_work", "qk")
    assert fit.slope == pytest.approx(2.0, abs=1e-9)


def test_fit_requires_enough_rows():
    rows = [_row(2, 2, q) for q in (2, 3, 4)]
    with pytest.raises(InvariantViolation):
        fit_slopes(rows, "ch_avg_work", "qk")


def test_fit_skips_nonpositive_values():
    rows = [_row(2, 2, q, ch_avg_work=float(q)) for q in (2, 3, 4, 5)]
    rows.append(_row(2, 2, 6, ch_avg_work=0.0))
    fit = fit_slopes(rows, "ch_avg_work", "q")
    assert fit.slope == pytest.approx(1.0, abs=1e-9)


def test_small_grid_rows_and_identities():
    rows = run_experiment(grid=[(2, 2, 2), (2, 2, 4)], seed=0)
    assert len(rows) == 2
    first = rows[0]
    assert (first.t, first.k, first.q) == (2, 2, 2)
    assert first.leaf_shortcuts == 8
    assert first.hl_total == 68
    assert first.hd_classic == 2
    assert first.tnr_avg_access_pairs == pytest.approx(4.0)


def test_grid_cell_caps_skip_with_reason():
    messages = []
    rows = run_experiment(grid=[(2, 2, 2), (2, 6, 8)], seed=0,
                          max_cell_nodes=100, log=messages.append)
    assert len(rows) == 1
    assert messages and "skipped" in messages[0]


def test_csv_round_trip_and_determinism():
    rows = run_experiment(grid=[(2, 2, 2)], seed=0)
    text1 = rows_to_csv(rows)
    text2 = rows_to_csv(run_experiment(grid=[(2, 2, 2)], seed=0))
    assert text1 == text2  # byte-identical reruns
    back = rows_from_csv(text1)
    assert back == rows
