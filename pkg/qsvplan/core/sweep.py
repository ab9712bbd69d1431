"""Figure data: exact homogeneous test counts and hedged overhead bounds as CSV rows."""

from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from pathlib import Path

from qsvplan.core.hedging import h_of, hedged_tests_exact_sweep, overhead_ratio_bound
from qsvplan.core.homogeneous import tests_homogeneous
from qsvplan.logger import get_logger
from qsvplan.models import HedgeSweepGrid, Precision, SweepGrid

logger = get_logger(__name__)

Row = dict[str, float | int]

NUM_TESTS_COLUMNS = ("lambda", "epsilon", "delta", "n_exact", "n_lower", "n_upper", "n_approx")
OVERHEAD_COLUMNS = ("nu", "epsilon", "delta", "p", "ratio_bound", "nu_h")
HEDGE_COLUMNS = ("lambda", "epsilon", "delta", "p", "lambda_p", "n_exact", "n_na", "ratio")


def default_grid(figure: int) -> SweepGrid:
    """Default grids; figure 2 walks the eps = delta diagonal."""
    if figure == 1:
        return SweepGrid(
            figure=1,
            lambdas=[0.1, 0.2, 0.3, math.exp(-1.0), 0.5, 0.6, 0.7, 0.8, 0.9],
            epsilons=[0.1, 0.01],
            deltas=[0.1, 0.01, 0.001],
        )
    diagonal = [10.0**-k for k in range(1, 7)]
    return SweepGrid(
        figure=2,
        nus=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        epsilons=diagonal,
        deltas=diagonal,
        paired=True,
    )


def sweep_num_tests(grid: SweepGrid) -> list[Row]:
    """One row per (lambda, eps, delta) with exact N, its sandwich and the approximation."""
    if grid.figure != 1:
        raise ValueError("sweep_num_tests needs a figure-1 grid")
    rows: list[Row] = []
    for lam in grid.lambdas:
        for epsilon, delta in grid.precisions():
            plan = tests_homogeneous(Precision(epsilon=epsilon, delta=delta), lam)
            rows.append(
                {
                    "lambda": lam,
                    "epsilon": epsilon,
                    "delta": delta,
                    "n_exact": plan.n_exact,
                    "n_lower": plan.n_lower,
                    "n_upper": plan.n_upper,
                    "n_approx": plan.n_approx,
                }
            )
    logger.debug("sweep_num_tests(): %d rows", len(rows))
    return rows


def sweep_overhead(grid: SweepGrid) -> list[Row]:
    """One row per (nu, eps, delta): overhead bound at p = nu/e for a singular strategy."""
    if grid.figure != 2:
        raise ValueError("sweep_overhead needs a figure-2 grid")
    rows: list[Row] = []
    for nu in grid.nus:
        p = nu / math.e
        nu_h = nu * h_of(p, nu, 0.0)
        for epsilon, delta in grid.precisions():
            precision = Precision(epsilon=epsilon, delta=delta)
            rows.append(
                {
                    "nu": nu,
                    "epsilon": epsilon,
                    "delta": delta,
                    "p": p,
                    "ratio_bound": overhead_ratio_bound(precision, nu, 0.0, p),
                    "nu_h": nu_h,
                }
            )
    logger.debug("sweep_overhead(): %d rows", len(rows))
    return rows


def sweep_hedging(grid: HedgeSweepGrid) -> list[Row]:
    """Exact hedged test counts of homogeneous strategies across p."""
    rows: list[Row] = []
    for lam in grid.lambdas:
        for epsilon in grid.epsilons:
            for delta in grid.deltas:
                rows += hedged_tests_exact_sweep(Precision(epsilon=epsilon, delta=delta), lam, grid.ps)
    return rows


def format_cell(value: float | int) -> str:
    if isinstance(value, int):
        return str(value)
    return format(value, ".17g")


def write_csv(rows: Sequence[Row], columns: Sequence[str], path: str | Path) -> Path:
    """Write rows with a header, '.' decimals, LF endings and 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row[column]) for column in columns])
    logger.debug("write_csv(): wrote %d rows to %s", len(rows), path)
    return path
