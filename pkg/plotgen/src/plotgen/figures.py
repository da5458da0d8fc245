"""Rendering layer: draw the tables, never recompute them.

The Agg backend is forced before pyplot loads so the tool works headless.
Each plot op returns the table it drew; ``--dump-table`` prints exactly
that object, which is what makes figures testable without pixels.
"""

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from plotgen import tables  # noqa: E402

FIGURE_KINDS = ("loss_vs_p", "prediction_curves")

OPTIMIZER_COLORS = {"adam": "tab:blue", "tadam": "tab:red"}
FALLBACK_COLORS = ("tab:green", "tab:purple", "tab:orange", "tab:brown")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw, from where, and where to put it.

    ``out_path`` may be empty when only the numeric table is wanted.
    ``data_path`` optionally points at a harness dataset CSV whose
    observations get scattered behind the prediction curves.
    """

    kind: str
    in_path: str
    out_path: str = ""
    data_path: str = ""
    band_quantiles: tuple[float, float] = (0.25, 0.75)
    title: str = ""

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"figure kind must be one of {FIGURE_KINDS}, "
                             f"got {self.kind!r}")
        if not self.in_path:
            raise ValueError("an input CSV path is required")
        lo, hi = self.band_quantiles
        if not (math.isfinite(lo) and math.isfinite(hi)
                and 0.0 <= lo < hi <= 1.0):
            raise ValueError(
                f"band quantiles must satisfy 0 <= low < high <= 1, "
                f"got {self.band_quantiles}")


def _color(optimizer: str, index: int) -> str:
    return OPTIMIZER_COLORS.get(
        optimizer, FALLBACK_COLORS[index % len(FALLBACK_COLORS)])


def plot_loss_vs_p(spec: FigureSpec) -> list[dict]:
    """Median loss vs contamination fraction, one banded line per optimizer.

    Returns the plotted table; writes the image only when ``out_path``
    is set.
    """
    rows = tables.read_rows(spec.in_path, tables.RESULTS_REQUIRED,
                            "results.csv")
    table = tables.loss_vs_p_table(rows, spec.band_quantiles)
    if spec.out_path:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        optimizers = sorted({row["optimizer"] for row in table})
        for i, optimizer in enumerate(optimizers):
            points = [row for row in table if row["optimizer"] == optimizer]
            ps = [row["p"] for row in points]
            color = _color(optimizer, i)
            ax.plot(ps, [row["median"] for row in points], marker="o",
                    color=color, label=optimizer)
            ax.fill_between(ps, [row["band_low"] for row in points],
                            [row["band_high"] for row in points],
                            color=color, alpha=0.2, linewidth=0)
        ax.set_yscale("log")
        ax.set_xlabel("corrupted targets (%)")
        ax.set_ylabel("final clean MSE (median, quantile band)")
        if spec.title:
            ax.set_title(spec.title)
        ax.legend()
        fig.tight_layout()
        fig.savefig(spec.out_path)
        plt.close(fig)
    return table


def _scatter_observations(ax, data_path: str) -> None:
    rows = tables.read_rows(data_path, tables.OBSERVATIONS_REQUIRED,
                            "dataset CSV")
    xs = [float(row["x"]) for row in rows]
    ts = [float(row["t"]) for row in rows]
    flags = [row["corrupted_flag"] in ("1", "true", "True")
             for row in rows]
    clean = [(x, t) for x, t, bad in zip(xs, ts, flags) if not bad]
    dirty = [(x, t) for x, t, bad in zip(xs, ts, flags) if bad]
    if clean:
        ax.scatter(*zip(*clean), s=6, color="0.6", alpha=0.5,
                   label="observations", zorder=1)
    if dirty:
        ax.scatter(*zip(*dirty), s=10, color="black", marker="x",
                   alpha=0.5, label="corrupted", zorder=1)


def plot_prediction_curves(spec: FigureSpec) -> list[dict]:
    """Fitted curves vs the analytic target, faint per seed, bold median.

    Returns the per-run / per-median worst-gap table; writes the image
    only when ``out_path`` is set.
    """
    rows = tables.read_rows(spec.in_path, tables.PREDICTIONS_REQUIRED,
                            "predictions.csv")
    curves = tables.prediction_curves(rows)
    table = tables.prediction_gap_table(curves)
    if spec.out_path:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        if spec.data_path:
            _scatter_observations(ax, spec.data_path)
        optimizers = sorted(curves.medians)
        for i, optimizer in enumerate(optimizers):
            color = _color(optimizer, i)
            for key, y in curves.runs.items():
                if key[0] == optimizer:
                    ax.plot(curves.x, y, color=color, alpha=0.25,
                            linewidth=0.8, zorder=2)
            ax.plot(curves.x, curves.medians[optimizer], color=color,
                    linewidth=2.0, label=f"{optimizer} (median)", zorder=3)
        ax.plot(curves.x, curves.reference(), color="black",
                linestyle="--", linewidth=1.2, label="sin(2πx)",
                zorder=4)
        ax.set_xlabel("x")
        ax.set_ylabel("prediction")
        ax.set_ylim(-1.6, 1.6)
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(loc="upper right", fontsize=8)
        fig.tight_layout()
        fig.savefig(spec.out_path)
        plt.close(fig)
    return table
