"""Render benchmark CSVs and fitted-game JSON into the three report figures.

Reads only the public file contracts: the benchmark CSV header
(instance_id,n,source,...,quality_ratio,runtime_ms) and the ISG JSON weight
list.  Rendering is deterministic: fixed style, no timestamps, colors keyed to
the sorted solver names, so identical inputs yield identical image bytes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("quality", "runtime", "weight-hist")

QUALITY_COLUMNS = ("n", "solver", "quality_ratio")
RUNTIME_COLUMNS = ("n", "solver", "runtime_ms")

FIG_SIZE = (7.0, 4.5)
DPI = 120
HIST_COLOR = "lightblue"


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class ReportSpec:
    kind: str
    out_path: str
    csv_paths: tuple[str, ...] = ()
    isg_path: str | None = None
    log_y: bool | None = None  # default: log scale for runtime only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ReportError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "weight-hist":
            if self.isg_path is None:
                raise ReportError("weight-hist needs --isg (an ISG JSON file)")
        elif not self.csv_paths:
            raise ReportError(f"{self.kind} needs --csv (a benchmark CSV)")


def load_rows(paths: tuple[str, ...], required: tuple[str, ...]) -> list[dict]:
    rows: list[dict] = []
    for path in paths:
        p = Path(path)
        if not p.exists():
            raise ReportError(f"input file not found: {path}")
        with p.open(newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for column in required:
                if column not in header:
                    raise ReportError(f"missing column {column!r} in {path}")
            rows.extend(reader)
    return rows


def load_weights(path: str) -> np.ndarray:
    p = Path(path)
    if not p.exists():
        raise ReportError(f"input file not found: {path}")
    doc = json.loads(p.read_text())
    if "weights" not in doc:
        raise ReportError(f"missing column 'weights' in {path}")
    values = [float(w) for _, _, w in doc["weights"] if float(w) != 0.0]
    return np.array(values)


def group_series(rows: list[dict], value_column: str) -> dict[str, dict[int, list[float]]]:
    """solver -> n -> list of values; blank (undefined) values are skipped."""
    series: dict[str, dict[int, list[float]]] = {}
    for row in rows:
        raw = row[value_column]
        if raw is None or raw == "":
            continue
        solver = row["solver"]
        n = int(row["n"])
        series.setdefault(solver, {}).setdefault(n, []).append(float(raw))
    return series


def _mean_std(values: list[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    if len(values) == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var)


def solver_stats(series: dict[str, dict[int, list[float]]]
                 ) -> dict[str, tuple[list[int], list[float], list[float]]]:
    """Per solver: sorted sizes with mean and sample-std of the grouped values."""
    stats = {}
    for solver in sorted(series):
        ns = sorted(series[solver])
        means, stds = [], []
        for n in ns:
            mean, std = _mean_std(series[solver][n])
            means.append(mean)
            stds.append(std)
        stats[solver] = (ns, means, stds)
    return stats


def _styled_axes(title: str, ylabel: str):
    fig, ax = plt.subplots(figsize=FIG_SIZE, dpi=DPI)
    ax.set_xlabel("number of agents")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _plot_curves(ax, stats, error_bars: bool):
    colors = plt.get_cmap("tab10")
    for idx, (solver, (ns, means, stds)) in enumerate(stats.items()):
        color = colors(idx % 10)
        if error_bars:
            ax.errorbar(ns, means, yerr=stds, marker="o", capsize=3,
                        label=solver, color=color)
        else:
            ax.plot(ns, means, marker="o", label=solver, color=color)
    if stats:
        ax.legend()


def render(spec: ReportSpec) -> None:
    """Write the requested figure; empty inputs render empty axes."""
    if spec.kind == "quality":
        rows = load_rows(spec.csv_paths, QUALITY_COLUMNS)
        stats = solver_stats(group_series(rows, "quality_ratio"))
        fig, ax = _styled_axes("solution quality", "value ratio vs reference")
        _plot_curves(ax, stats, error_bars=True)
        if spec.log_y:
            ax.set_yscale("log")
    elif spec.kind == "runtime":
        rows = load_rows(spec.csv_paths, RUNTIME_COLUMNS)
        stats = solver_stats(group_series(rows, "runtime_ms"))
        fig, ax = _styled_axes("running time", "runtime (ms)")
        _plot_curves(ax, stats, error_bars=False)
        if spec.log_y is None or spec.log_y:
            ax.set_yscale("log")
    else:
        weights = load_weights(spec.isg_path)
        fig, ax = plt.subplots(figsize=FIG_SIZE, dpi=DPI)
        if weights.size:
            ax.hist(weights, bins=30, color=HIST_COLOR, edgecolor="steelblue")
        ax.set_xlabel("pairwise weight")
        ax.set_ylabel("count")
        ax.set_title("fitted weight distribution")
        ax.grid(True, alpha=0.3)

    fig.tight_layout()
    fig.savefig(spec.out_path)
    plt.close(fig)
