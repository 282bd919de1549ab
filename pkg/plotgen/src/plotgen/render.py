"""Panel figures from exported run CSVs.

Four figure kinds: latency or throughput, over time or as a CDF. Every
figure is a 2x2 grid with one subplot per service category and one line
per run directory, labelled with the controller mode recorded in the
run's manifest. Nothing is recomputed here; the CSV columns are plotted
exactly as written, so identical CSVs always yield identical figures.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

METRICS = ("latency", "throughput")
STYLES = ("time", "cdf")

PANELS = (("VO", "(a) Voice"), ("VI", "(b) Video"),
          ("HD", "(c) HD Map"), ("BE", "(d) Best-Effort"))

# colours and dashes are keyed by mode label so a mode looks the same in
# every figure it appears in, whatever else is overlaid
MODE_STYLE: Dict[str, Tuple[str, str]] = {
    "NonQoS":            ("#7f7f7f", "--"),
    "QoS":               ("#1f77b4", "-"),
    "CWminFixed":        ("#8c564b", "-."),
    "CWmin":             ("#9467bd", "-"),
    "CWminmax":          ("#2ca02c", "-"),
    "CWminmaxIFS":       ("#ff7f0e", "-"),
    "CWminmaxIFS_STime": ("#d62728", "-"),
}
FALLBACK_STYLE = ("#17becf", ":")

Series = Dict[str, Tuple[List[float], List[float]]]


class MissingInput(Exception):
    """A run directory lacks a file the figure needs; str() is the path."""


def _reader(path: Path):
    if not path.exists():
        raise MissingInput(str(path))
    return open(path, newline="")


def mode_label(run_dir: Path) -> str:
    path = run_dir / "manifest.json"
    if not path.exists():
        raise MissingInput(str(path))
    with open(path) as fh:
        return json.load(fh)["mode_label"]


def load_time_series(run_dir: Path, metric: str) -> Series:
    """Per-category x/y arrays from series.csv.

    Latency buckets that delivered nothing are written with an empty cell;
    those rows are gaps, not zeros, so they are skipped.
    """
    out: Series = {short: ([], []) for short, _ in PANELS}
    column = "mean_latency" if metric == "latency" else "throughput"
    with _reader(run_dir / "series.csv") as fh:
        for row in csv.DictReader(fh):
            if row[column] == "":
                continue
            xs, ys = out[row["category"]]
            xs.append(float(row["bucket_start"]))
            ys.append(float(row[column]))
    return out


def load_cdf(run_dir: Path, metric: str) -> Series:
    name = f"cdf_{metric}.csv"
    out: Series = {short: ([], []) for short, _ in PANELS}
    with _reader(run_dir / name) as fh:
        for row in csv.DictReader(fh):
            xs, ys = out[row["category"]]
            xs.append(float(row[metric]))
            ys.append(float(row["cum_fraction"]))
    return out


def build_figure(run_dirs: Sequence, metric: str, style: str):
    """2x2 category grid with one line per run directory."""
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if style not in STYLES:
        raise ValueError(f"style must be one of {STYLES}, got {style!r}")
    fig, axes = plt.subplots(2, 2, figsize=(11.0, 7.5))
    flat = axes.ravel()
    handles = []
    labels = []
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        label = mode_label(run_dir)
        color, dash = MODE_STYLE.get(label, FALLBACK_STYLE)
        data = (load_time_series(run_dir, metric) if style == "time"
                else load_cdf(run_dir, metric))
        for ax, (short, _) in zip(flat, PANELS):
            xs, ys = data[short]
            line, = ax.plot(xs, ys, color=color, linestyle=dash, label=label)
        handles.append(line)
        labels.append(label)
    unit = "latency (s)" if metric == "latency" else "throughput (b/s)"
    for ax, (_, title) in zip(flat, PANELS):
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        if style == "time":
            ax.set_xlabel("time (s)")
            ax.set_ylabel(unit)
        else:
            ax.set_xlabel(unit)
            ax.set_ylabel("cumulative fraction")
            ax.set_ylim(0.0, 1.05)
    fig.legend(handles, labels, loc="lower center", ncol=min(len(labels), 4))
    fig.tight_layout(rect=(0.0, 0.06, 1.0, 1.0))
    return fig


def render(run_dirs: Sequence, metric: str, style: str, out_path) -> Path:
    fig = build_figure(run_dirs, metric, style)
    out = Path(out_path)
    fig.savefig(out)
    plt.close(fig)
    return out
