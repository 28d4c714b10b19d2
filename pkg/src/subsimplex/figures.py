"""Matplotlib report figures: score scatter matrices and loading bars.

Rendering is headless (Agg) and byte-deterministic: no timestamps are
embedded in the PNG output, so re-running a configuration reproduces the
files exactly.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ternary import PALETTE, group_colors

#: At most this many modes appear in the scatter matrix.
MAX_SCATTER_MODES = 4

#: Bar charts keep only this many largest-magnitude parts.
MAX_BAR_PARTS = 12

_PNG_OPTIONS = {"dpi": 130, "metadata": {"Software": "subsimplex"}}


def save_score_matrix(scores: np.ndarray, mode_names: list[str], path,
                      groups=None, title: str | None = None) -> None:
    """Pairwise scatter of the leading modes, densities on the diagonal.

    ``scores`` columns must already be ordered first mode first.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    k = min(scores.shape[1], MAX_SCATTER_MODES)
    scores = scores[:, :k]
    colors = group_colors(tuple(groups) if groups is not None else None,
                          len(scores))
    fig, axes = plt.subplots(k, k, figsize=(2.1 * k + 0.8, 2.1 * k + 0.6),
                             squeeze=False)
    for r in range(k):
        for c in range(k):
            ax = axes[r][c]
            if r == c:
                _density(ax, scores[:, c], colors)
            else:
                ax.scatter(scores[:, c], scores[:, r], s=12, c=colors,
                           alpha=0.85, linewidths=0)
            if r == k - 1:
                ax.set_xlabel(mode_names[c], fontsize=9)
            else:
                ax.set_xticklabels([])
            if c == 0:
                ax.set_ylabel(mode_names[r], fontsize=9)
            else:
                ax.set_yticklabels([])
            ax.tick_params(labelsize=7)
    if title:
        fig.suptitle(title, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, **_PNG_OPTIONS)
    plt.close(fig)


def save_loading_bars(loadings: np.ndarray, part_names: list[str],
                      mode_names: list[str], path, title: str | None = None) -> None:
    """One bar panel per mode: positive parts red, negative parts green.

    When there are many parts, each panel keeps the ``MAX_BAR_PARTS``
    largest-magnitude ones.
    """
    loadings = np.atleast_2d(np.asarray(loadings, dtype=float))
    k = loadings.shape[0]
    fig, axes = plt.subplots(k, 1, figsize=(7.0, 1.9 * k + 0.6), squeeze=False)
    for r in range(k):
        ax = axes[r][0]
        row = loadings[r]
        keep = np.arange(len(row))
        if len(row) > MAX_BAR_PARTS:
            keep = np.sort(np.argsort(np.abs(row))[::-1][:MAX_BAR_PARTS])
        values = row[keep]
        bar_colors = ["#d62728" if v >= 0 else "#2ca02c" for v in values]
        ax.bar(range(len(keep)), values, color=bar_colors)
        ax.axhline(0.0, color="#303030", linewidth=0.8)
        ax.set_xticks(range(len(keep)))
        ax.set_xticklabels([part_names[p] for p in keep], rotation=45,
                           ha="right", fontsize=8)
        ax.set_ylabel(mode_names[r], fontsize=9)
        ax.tick_params(labelsize=8)
    if title:
        fig.suptitle(title, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, **_PNG_OPTIONS)
    plt.close(fig)


def _density(ax, values: np.ndarray, colors: list[str]) -> None:
    """Gaussian kernel density per color group (one curve per group)."""
    span = np.ptp(values)
    grid = np.linspace(values.min() - 0.1 * span - 1e-9,
                       values.max() + 0.1 * span + 1e-9, 160)
    for color in dict.fromkeys(colors):
        member = values[[c == color for c in colors]]
        bandwidth = 1.06 * (member.std() + 1e-9) * len(member) ** -0.2
        kernels = np.exp(-0.5 * ((grid[:, None] - member[None, :]) / bandwidth) ** 2)
        density = kernels.sum(axis=1) / (len(member) * bandwidth * np.sqrt(2 * np.pi))
        ax.plot(grid, density, color=color, linewidth=1.2)
    ax.set_yticks([])
