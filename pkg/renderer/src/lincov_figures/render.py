"""Render metric time series and sample scatters from study CSV output.

The renderer consumes only the study's public CSV contract: a ``t`` column
plus named metric columns, empty cells meaning "no value at this time".
Empty cells become NaN and draw as gaps in the lines, never as zeros.
"""

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FIGURE_GROUPS", "load_metrics", "render_group", "render_scatter", "render_all"]

# (name, columns, y label, y scale)
FIGURE_GROUPS = [
    ("esmd", ["esmd_2", "esmd_ut", "esmd_mc"],
     "expected squared Mahalanobis distance", "linear"),
    ("esmdole", ["esmdole_2", "esmdole_mc"],
     "expected squared Mahalanobis distance of linearization error", "linear"),
    ("smdm", ["smdm_2", "smdm_ut", "smdm_mc"],
     "squared Mahalanobis distance of the means", "linear"),
    ("mcr", ["mcr_2", "mcr_ut", "mcr_mc"], "maximal covariance ratio", "linear"),
    ("stretching", ["wussos", "wussolc"],
     "whitened uncertainty-scaled second-order nonlinearity", "linear"),
    ("wussadl", ["wussadl"],
     "whitened statistical vs deterministic linearization difference", "log"),
    ("skewness", ["max_skew_2", "max_skew_mc"], "maximal directional skewness", "linear"),
    ("kurtosis", ["max_kurt_2", "max_kurt_mc"],
     "maximal directional excess kurtosis", "linear"),
]

_STYLES = {
    "_2": dict(color="tab:blue", label="second-order"),
    "_ut": dict(color="tab:green", label="unscented"),
    "_mc": dict(color="tab:orange", label="Monte Carlo"),
}


def load_metrics(csv_path) -> dict:
    """Read the metrics CSV into named float arrays; empty cells become NaN."""
    with open(csv_path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise ValueError(f"no data rows in {csv_path}")
    out = {}
    for name in rows[0].keys():
        vals = []
        for r in rows:
            cell = r[name].strip()
            if cell == "":
                vals.append(np.nan)
            elif cell in ("true", "false"):
                vals.append(1.0 if cell == "true" else 0.0)
            else:
                vals.append(float(cell))
        out[name] = np.array(vals)
    if "t" not in out:
        raise ValueError("metrics CSV is missing the required column 't'")
    return out


def _style_for(column: str) -> dict:
    for suffix, style in _STYLES.items():
        if column.endswith(suffix):
            return dict(style)
    return dict(color="tab:purple", label=column)


def render_group(metrics: dict, name: str, columns, ylabel: str, yscale: str,
                 out_path: Path) -> Path:
    missing = [c for c in columns if c not in metrics]
    if missing:
        raise ValueError(f"metrics CSV is missing column(s): {', '.join(missing)}")
    t = metrics["t"]
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for col in columns:
        style = _style_for(col)
        series = metrics[col]
        if yscale == "log":
            series = np.where(series > 0.0, series, np.nan)
        ax.plot(t, series, lw=1.4, **style)
    ax.set_xlabel("time [TU]")
    ax.set_ylabel(ylabel)
    ax.set_yscale(yscale)
    if len(columns) > 1:
        ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_scatter(samples_csv, out_path: Path) -> Path:
    """x-y scatter of a dumped sample cloud (first two state columns)."""
    data = np.loadtxt(samples_csv, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError(f"sample dump {samples_csv} must have at least two columns")
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    ax.scatter(data[:, 0], data[:, 1], s=2.0, alpha=0.4, color="tab:blue",
               edgecolors="none")
    ax.set_xlabel("x [nd]")
    ax.set_ylabel("y [nd]")
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_all(csv_path, out_dir, samples_csv=None, image_format: str = "png") -> list:
    """Render every figure group, plus the sample scatter when a dump is given."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics = load_metrics(csv_path)
    written = []
    for name, columns, ylabel, yscale in FIGURE_GROUPS:
        out_path = out_dir / f"{name}.{image_format}"
        written.append(render_group(metrics, name, columns, ylabel, yscale, out_path))
    if samples_csv is not None:
        written.append(render_scatter(samples_csv, out_dir / f"scatter.{image_format}"))
    return written
