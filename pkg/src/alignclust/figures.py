"""Rendering of the benchmark summary to a figure file.

Uses the non-interactive Agg backend so rendering works headless; the figure
is a plain error-bar plot of mean classification error against noise level,
one series per method, written next to the CSV tables.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_benchmark_figure(summary_rows, path, title=None) -> None:
    """Write an error-bar plot of a benchmark summary to ``path``.

    Parameters
    ----------
    summary_rows : list of dict
        Rows as produced by ``bench.summarize`` (keys noise_level, method,
        mean_error, stderr, n_trials).
    path : str
        Output image path; format follows the extension (.png, .pdf, .svg).
    title : str, optional
        Figure title.
    """
    methods = []
    for row in summary_rows:
        if row["method"] not in methods:
            methods.append(row["method"])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for method in methods:
        levels = [r["noise_level"] for r in summary_rows if r["method"] == method]
        means = [r["mean_error"] for r in summary_rows if r["method"] == method]
        errs = [r["stderr"] for r in summary_rows if r["method"] == method]
        ax.errorbar(levels, means, yerr=errs, marker="o", capsize=3, label=method)
    ax.set_xlabel("noise level (sigma per Fourier coefficient)")
    ax.set_ylabel("mean classification error")
    ax.set_ylim(bottom=-0.02)
    ax.grid(True, alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
