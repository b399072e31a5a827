"""Render median/IQR capacity curves from a sweep summary CSV.

The input is the summary file the sweep engine writes: one row per
(capacity, metric) with columns capacity,ratio,metric,median,q25,q75.
A figure shows the median train/test curves for the selected metric on a
log-log ratio axis, the interquartile band, a dashed vertical line at the
interpolation threshold (ratio 1), and optionally a dashed horizontal
baseline. Rows whose median is infinite (diverged cells) are clipped to
the top of the axis and drawn with a distinct marker rather than dropped.

Command line:
    narxdd-render --summary summary.csv --metric osa --out figure.png
                  [--baseline 0.25]
"""

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SUMMARY_COLUMNS = ("capacity", "ratio", "metric", "median", "q25", "q75")

# selector -> list of (label, metric column) curves on one figure
METRICS = {
    "osa": [("train", "train_mse_osa"), ("test", "test_mse_osa")],
    "free": [("train", "train_mse_free"), ("test", "test_mse_free")],
    "norm": [("parameter norm", "param_norm")],
}
Y_LABELS = {
    "osa": "one-step-ahead MSE",
    "free": "free-run simulation MSE",
    "norm": "parameter norm",
}


@dataclass(frozen=True)
class PlotSpec:
    summary_path: str
    metric: str  # "osa", "free" or "norm"
    out_path: str
    baseline: float | None = None

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(
                f"unknown metric {self.metric!r}; choose from {sorted(METRICS)}"
            )


def load_summary(path):
    """Parse the summary CSV into a list of row dicts with float fields."""
    rows = []
    with open(path) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(SUMMARY_COLUMNS):
            raise ValueError(
                f"{path}: expected columns {','.join(SUMMARY_COLUMNS)}, "
                f"got {reader.fieldnames}"
            )
        for record in reader:
            rows.append({
                "capacity": int(record["capacity"]),
                "ratio": float(record["ratio"]),
                "metric": record["metric"],
                "median": float(record["median"]),
                "q25": float(record["q25"]),
                "q75": float(record["q75"]),
            })
    if not rows:
        raise ValueError(f"{path}: summary file has no data rows")
    return rows


def _series(rows, column):
    picked = sorted(
        (r for r in rows if r["metric"] == column), key=lambda r: r["ratio"]
    )
    if not picked:
        raise ValueError(f"summary lacks any {column!r} rows")
    return picked


def _finite_bounds(series_list):
    values = [
        v
        for series in series_list
        for r in series
        for v in (r["median"], r["q25"], r["q75"])
        if v > 0 and v != float("inf")
    ]
    if not values:
        return 1e-3, 1.0
    lo, hi = min(values), max(values)
    # 10% margins in log space
    span = (hi / lo) ** 0.1 if hi > lo else 2.0
    return lo / span, hi * span


def render(spec: PlotSpec):
    """Draw the figure and write it to spec.out_path; returns the Figure."""
    rows = load_summary(spec.summary_path)
    curves = [(label, _series(rows, col)) for label, col in METRICS[spec.metric]]
    y_lo, y_hi = _finite_bounds([series for _, series in curves])

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_xscale("log")
    ax.set_yscale("log")
    clip = lambda v: min(v, y_hi) if v != float("inf") else y_hi

    for (label, series), color in zip(curves, ("tab:blue", "tab:orange")):
        ratios = [r["ratio"] for r in series]
        finite = [r for r in series if r["median"] != float("inf")]
        if finite:
            ax.plot(
                [r["ratio"] for r in finite],
                [r["median"] for r in finite],
                marker=".", color=color, label=label,
            )
        diverged = [r for r in series if r["median"] == float("inf")]
        if diverged:
            ax.plot(
                [r["ratio"] for r in diverged], [y_hi] * len(diverged),
                linestyle="none", marker="^", color=color,
                label=f"{label} (clipped: diverged)",
            )
        ax.fill_between(
            ratios,
            [max(clip(r["q25"]), y_lo) for r in series],
            [clip(r["q75"]) for r in series],
            alpha=0.2, color=color, linewidth=0,
        )

    ax.axvline(1.0, color="black", linestyle="--", linewidth=1.0)
    if spec.baseline is not None:
        ax.axhline(
            spec.baseline, color="gray", linestyle="--", linewidth=1.0,
            label="linear baseline",
        )
    ax.set_ylim(y_lo, y_hi * 1.5)
    ax.set_xlabel("capacity / training samples")
    ax.set_ylabel(Y_LABELS[spec.metric])
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="narxdd-render",
        description="Render median/IQR capacity curves from a sweep summary CSV.",
    )
    parser.add_argument("--summary", required=True, help="summary CSV path")
    parser.add_argument("--metric", required=True, choices=sorted(METRICS),
                        help="osa: one-step MSE, free: free-run MSE, norm: parameter norm")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--baseline", type=float, default=None,
                        help="draw a dashed horizontal reference at this value")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        render(PlotSpec(args.summary, args.metric, args.out, args.baseline))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
