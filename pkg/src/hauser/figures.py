"""Chart rendering for evaluation runs.

Everything draws through the Agg backend and writes PNG files, so the
renderers work in headless environments and their outputs can sit next to
the delimited tables they illustrate.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .meta import SweepPoint


def render_scatter(
    metric_values: Sequence[float],
    human_values: Sequence[float],
    path: str | Path,
    metric_label: str = "metric",
    human_label: str = "mean human rating",
    title: str | None = None,
) -> Path:
    """Metric vs human scatter, one point per candidate."""
    if len(metric_values) != len(human_values):
        raise ValueError("metric and human columns must be aligned")
    if not metric_values:
        raise ValueError("nothing to plot")
    path = Path(path)
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    try:
        ax.scatter(metric_values, human_values, s=18, alpha=0.7, edgecolors="none")
        ax.set_xlabel(metric_label)
        ax.set_ylabel(human_label)
        if title:
            ax.set_title(title)
        ax.grid(True, linewidth=0.3, alpha=0.5)
        fig.tight_layout()
        # no Software tag, so reruns produce identical bytes
        fig.savefig(path, dpi=120, metadata={"Software": None})
    finally:
        plt.close(fig)
    return path


def render_sweep(
    points: Sequence[SweepPoint],
    path: str | Path,
    title: str | None = None,
) -> Path:
    """Correlation as a function of reference corpus size, log-x line plot."""
    if not points:
        raise ValueError("nothing to plot")
    path = Path(path)
    ordered = sorted(points, key=lambda p: p.fraction)
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    try:
        ax.plot(
            [p.fraction for p in ordered],
            [p.rho for p in ordered],
            marker="o",
            linewidth=1.2,
        )
        ax.set_xscale("log")
        ax.set_xlabel("corpus fraction")
        ax.set_ylabel("Spearman rho")
        if title:
            ax.set_title(title)
        ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
        fig.tight_layout()
        fig.savefig(path, dpi=120, metadata={"Software": None})
    finally:
        plt.close(fig)
    return path
