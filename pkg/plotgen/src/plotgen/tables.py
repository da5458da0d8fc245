"""The numeric layer: CSV rows in, plotted statistics out.

Every figure draws numbers produced here and nothing else, which is what
makes ``--dump-table`` a faithful transcript of a figure.  Aggregation is
limited to medians and quantiles of values the harness already computed.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

RESULTS_REQUIRED = ("optimizer", "p", "seed", "final_clean_mse")
PREDICTIONS_REQUIRED = ("optimizer", "p", "seed", "x", "prediction")
OBSERVATIONS_REQUIRED = ("x", "t", "clean_t", "corrupted_flag")

LOSS_TABLE_COLUMNS = ("optimizer", "p", "n_runs", "median", "band_low",
                      "band_high")
GAP_TABLE_COLUMNS = ("optimizer", "p", "seed", "max_gap")


class SchemaError(ValueError):
    """An input CSV does not have the shape the figure needs."""


def format_float(x) -> str:
    return repr(float(x))


def read_rows(path, required: tuple[str, ...], label: str) -> list[dict]:
    """Load a harness CSV, insisting on the named columns.

    Extra columns ride along untouched; missing ones are reported by name.
    """
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"cannot read {label} at {path}: {exc}") from exc
    if header is None:
        raise SchemaError(f"{label} at {path} is empty (no header row)")
    missing = [name for name in required if name not in header]
    if missing:
        raise SchemaError(
            f"{label} at {path} is missing column(s): {', '.join(missing)}")
    if not rows:
        raise SchemaError(f"{label} at {path} has a header but no data rows")
    return rows


def _parse(row: dict, column: str, kind, label: str, lineno: int):
    raw = row.get(column)
    try:
        value = kind(raw)
    except (TypeError, ValueError) as exc:
        raise SchemaError(
            f"{label} row {lineno}: column {column!r} has "
            f"non-{kind.__name__} value {raw!r}") from exc
    if kind is float and not math.isfinite(value):
        raise SchemaError(
            f"{label} row {lineno}: column {column!r} is not finite ({raw})")
    return value


def loss_vs_p_table(rows: list[dict],
                    band_quantiles: tuple[float, float] = (0.25, 0.75),
                    ) -> list[dict]:
    """Median loss per (optimizer, p) with a quantile band over runs.

    Rows come from results.csv; runs sharing an optimizer and p are pooled
    regardless of any other columns.  Needs at least two distinct p values
    to make a curve.
    """
    lo_q, hi_q = band_quantiles
    if not (0.0 <= lo_q < hi_q <= 1.0):
        raise ValueError(
            f"band quantiles must satisfy 0 <= low < high <= 1, "
            f"got {band_quantiles}")
    groups: dict[tuple[str, int], list[float]] = {}
    for i, row in enumerate(rows, start=2):
        key = (row["optimizer"], _parse(row, "p", int, "results.csv", i))
        groups.setdefault(key, []).append(
            _parse(row, "final_clean_mse", float, "results.csv", i))
    p_values = {p for _, p in groups}
    if len(p_values) < 2:
        raise ValueError(
            f"need at least two distinct p values to plot a curve, "
            f"got {sorted(p_values)}")
    table = []
    for (optimizer, p), losses in sorted(groups.items()):
        values = np.asarray(losses)
        table.append({
            "optimizer": optimizer,
            "p": p,
            "n_runs": len(losses),
            "median": float(np.median(values)),
            "band_low": float(np.quantile(values, lo_q)),
            "band_high": float(np.quantile(values, hi_q)),
        })
    return table


@dataclass(frozen=True)
class PredictionCurves:
    """Per-run prediction curves on a shared input grid.

    ``runs`` maps (optimizer, p, seed) to the curve's outputs;
    ``medians`` maps optimizer to the pointwise median over its runs.
    """

    x: np.ndarray
    runs: dict[tuple[str, int, int], np.ndarray]
    medians: dict[str, np.ndarray]

    def reference(self) -> np.ndarray:
        """The analytic target curve sin(2*pi*x) on the shared grid."""
        return np.sin(2.0 * np.pi * self.x)


def prediction_curves(rows: list[dict]) -> PredictionCurves:
    """Regroup flat predictions.csv rows into per-run curves.

    All runs must cover the identical input grid; a mismatch is a hard
    error because pointwise medians would silently misalign otherwise.
    """
    per_run: dict[tuple[str, int, int], list[tuple[float, float]]] = {}
    for i, row in enumerate(rows, start=2):
        key = (row["optimizer"], _parse(row, "p", int, "predictions.csv", i),
               _parse(row, "seed", int, "predictions.csv", i))
        per_run.setdefault(key, []).append(
            (_parse(row, "x", float, "predictions.csv", i),
             _parse(row, "prediction", float, "predictions.csv", i)))
    grid: np.ndarray | None = None
    grid_key = None
    runs: dict[tuple[str, int, int], np.ndarray] = {}
    for key, points in per_run.items():
        points.sort()
        x = np.array([px for px, _ in points])
        y = np.array([py for _, py in points])
        if grid is None:
            grid, grid_key = x, key
        elif x.shape != grid.shape or not np.array_equal(x, grid):
            raise ValueError(
                f"prediction grids disagree: run {grid_key} has "
                f"{grid.size} points, run {key} has {x.size} or different "
                f"x values")
        runs[key] = y
    medians = {}
    for optimizer in sorted({key[0] for key in runs}):
        stack = np.stack([y for key, y in runs.items()
                          if key[0] == optimizer])
        medians[optimizer] = np.median(stack, axis=0)
    return PredictionCurves(x=grid, runs=runs, medians=medians)


def prediction_gap_table(curves: PredictionCurves) -> list[dict]:
    """Worst absolute gap to sin(2*pi*x), per run and per median curve.

    Median rows use p = -1 and seed = -1 (no single run owns them).
    """
    reference = curves.reference()
    table = []
    for (optimizer, p, seed), y in sorted(curves.runs.items()):
        table.append({"optimizer": optimizer, "p": p, "seed": seed,
                      "max_gap": float(np.max(np.abs(y - reference)))})
    for optimizer, y in sorted(curves.medians.items()):
        table.append({"optimizer": optimizer, "p": -1, "seed": -1,
                      "max_gap": float(np.max(np.abs(y - reference)))})
    return table


def format_table(table: list[dict], columns: tuple[str, ...]) -> str:
    """Render a table as CSV text, floats in shortest round-trip form."""
    lines = [",".join(columns)]
    for row in table:
        cells = []
        for name in columns:
            value = row[name]
            cells.append(format_float(value) if isinstance(value, float)
                         else str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
