import math

import pytest

from qsvplan.core.hedging import h_of
from qsvplan.core.sweep import (
    HEDGE_COLUMNS,
    NUM_TESTS_COLUMNS,
    OVERHEAD_COLUMNS,
    default_grid,
    format_cell,
    sweep_hedging,
    sweep_num_tests,
    sweep_overhead,
    write_csv,
)
from qsvplan.models import HedgeSweepGrid, SweepGrid


# ---- figure 1 ----
def test_single_point_grid_gives_one_row():
    rows = sweep_num_tests(SweepGrid(figure=1, lambdas=[0.5], epsilons=[0.1], deltas=[0.1]))
    assert len(rows) == 1
    assert rows[0]["n_exact"] == 62
    assert rows[0]["n_approx"] == pytest.approx(66.44, abs=0.01)


def test_one_over_e_minimizes_the_default_grid():
    grid = default_grid(1).model_copy(update={"epsilons": [0.01], "deltas": [0.001]})
    rows = sweep_num_tests(grid)
    best = min(rows, key=lambda row: row["n_exact"])
    assert best["lambda"] == pytest.approx(1.0 / math.e)


def test_approximation_is_tight_at_high_precision():
    lambdas = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]
    rows = sweep_num_tests(SweepGrid(figure=1, lambdas=lambdas, epsilons=[1e-3], deltas=[1e-3]))
    for row in rows:
        assert abs(row["n_exact"] - row["n_approx"]) / row["n_exact"] <= 0.10


def test_rows_follow_grid_order():
    grid = SweepGrid(figure=1, lambdas=[0.3, 0.6], epsilons=[0.1, 0.05], deltas=[0.1])
    rows = sweep_num_tests(grid)
    assert [(row["lambda"], row["epsilon"]) for row in rows] == [(0.3, 0.1), (0.3, 0.05), (0.6, 0.1), (0.6, 0.05)]


def test_wrong_figure_is_rejected():
    with pytest.raises(ValueError):
        sweep_num_tests(default_grid(2))
    with pytest.raises(ValueError):
        sweep_overhead(default_grid(1))


# ---- figure 2 ----
def test_projector_row_at_one_tenth():
    rows = sweep_overhead(SweepGrid(figure=2, nus=[1.0], epsilons=[0.1], deltas=[0.1]))
    assert rows[0]["ratio_bound"] == pytest.approx(2.995, abs=1e-3)
    assert rows[0]["p"] == pytest.approx(1.0 / math.e)


def test_overhead_rows_decrease_towards_nu_h():
    grid = default_grid(2)
    rows = sweep_overhead(grid)
    for nu in grid.nus:
        curve = [row for row in rows if row["nu"] == nu]
        ratios = [row["ratio_bound"] for row in curve]
        assert all(b < a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] == pytest.approx(curve[-1]["nu_h"], rel=1e-4)
        assert all(ratio <= 3.0 for ratio in ratios)
        assert 1.0 < curve[0]["nu_h"] <= math.e + 1e-12
        assert curve[0]["nu_h"] == pytest.approx(nu * h_of(nu / math.e, nu, 0.0))


# ---- hedging sweep ----
def test_sweep_hedging_covers_the_product_grid():
    grid = HedgeSweepGrid(lambdas=[0.0, 0.5], epsilons=[0.1], deltas=[0.1, 0.01], ps=[0.0, 0.2, 0.4])
    rows = sweep_hedging(grid)
    assert len(rows) == 2 * 1 * 2 * 3
    assert set(rows[0]) == set(HEDGE_COLUMNS)
    singular = [row for row in rows if row["lambda"] == 0.0 and row["delta"] == 0.1]
    # hedging the projector beats the unhedged 1 / (eps delta) count
    assert singular[0]["n_exact"] == 90
    assert min(row["n_exact"] for row in singular[1:]) < 90


# ---- CSV ----
def test_format_cell():
    assert format_cell(62) == "62"
    assert format_cell(0.1) == "0.10000000000000001"
    assert float(format_cell(1.0 / 3.0)) == 1.0 / 3.0


def test_write_csv(tmp_path):
    rows = sweep_num_tests(SweepGrid(figure=1, lambdas=[0.5], epsilons=[0.1], deltas=[0.1]))
    path = write_csv(rows, NUM_TESTS_COLUMNS, tmp_path / "out" / "figure1.csv")

    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == ",".join(NUM_TESTS_COLUMNS)
    cells = lines[1].split(",")
    assert cells[:6] == ["0.5", "0.10000000000000001", "0.10000000000000001", "62", "57", "64"]
    assert float(cells[6]) == rows[0]["n_approx"]
    assert raw.endswith(b"\n")


def test_write_csv_overhead_columns(tmp_path):
    rows = sweep_overhead(SweepGrid(figure=2, nus=[0.5], epsilons=[0.1, 0.01], deltas=[0.1, 0.01], paired=True))
    path = write_csv(rows, OVERHEAD_COLUMNS, tmp_path / "figure2.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "nu,epsilon,delta,p,ratio_bound,nu_h"
    assert len(lines) == 3
