"""Figure rendering for experiment reports.

Renders the standardized-statistic diagnostics next to the delimited
outputs: a histogram with the standard normal density overlaid and the
empirical CDF against the normal CDF. Pure functions of the replication
records, so the files are byte-reproducible for a given experiment.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .experiments import ExperimentResult
from .normal import normal_cdf


def render_experiment_figures(result: ExperimentResult, outdir: str) -> list:
    """Write diagnostic figures into ``outdir``; returns the file paths."""
    stats = np.array([r.statistic for r in result.records if not r.failure])
    if stats.size < 2:
        return []
    paths = []

    lo = min(stats.min(), -4.0)
    hi = max(stats.max(), 4.0)
    grid = np.linspace(lo, hi, 400)
    pdf = np.exp(-0.5 * grid**2) / math.sqrt(2 * math.pi)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(stats, bins=max(10, stats.size // 15), density=True,
            color="#7aa6c2", edgecolor="white", label="standardized statistic")
    ax.plot(grid, pdf, "k-", lw=1.2, label="standard normal")
    ax.set_xlabel("statistic")
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(outdir, "statistic_hist.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    srt = np.sort(stats)
    ecdf = np.arange(1, srt.size + 1) / srt.size
    cdf = np.array([normal_cdf(v) for v in grid])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(srt, ecdf, where="post", color="#7aa6c2", label="empirical CDF")
    ax.plot(grid, cdf, "k-", lw=1.2, label="standard normal CDF")
    ax.set_xlabel("statistic")
    ax.set_ylabel("probability")
    ax.legend(frameon=False)
    fig.tight_layout()
    path = os.path.join(outdir, "statistic_cdf.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    return paths
