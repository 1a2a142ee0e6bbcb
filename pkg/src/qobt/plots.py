"""Matplotlib rendering of decay curves, singular-value ladders, and error
series to files, in the semilog style the reduction literature plots them.
CSV remains the canonical output; figures are a convenience layer."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_decay", "plot_sigma", "plot_error_series"]

_FLOOR = 1e-300


def _finish(fig, ax, path, xlabel, ylabel, title):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    fig.savefig(str(path), dpi=150)
    plt.close(fig)
    return Path(path)


def plot_decay(curves: dict, path, title=""):
    """Semilog plot of normalized eigenvalue decay curves, one per label."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, values in curves.items():
        values = np.asarray(values, float)
        if values.size == 0:
            continue
        ax.semilogy(np.arange(1, values.size + 1),
                    np.maximum(values, _FLOOR), marker=".", ms=3,
                    label=label)
    return _finish(fig, ax, path, "index", "normalized eigenvalue", title)


def plot_sigma(sigma, path, discarded=None, title=""):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    sigma = np.asarray(sigma, float)
    ax.semilogy(np.arange(1, sigma.size + 1), np.maximum(sigma, _FLOOR),
                "o", ms=4, label="retained")
    if discarded is not None and len(discarded):
        discarded = np.asarray(discarded, float)
        ax.semilogy(np.arange(sigma.size + 1, sigma.size + discarded.size + 1),
                    np.maximum(discarded, _FLOOR), "x", ms=4,
                    label="discarded")
    return _finish(fig, ax, path, "index", "singular value", title)


def plot_error_series(series_by_method: dict, path, channel=0, title=""):
    """Semilog relative output error vs time, one line per method."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, series in series_by_method.items():
        err = np.maximum(series.errors[:, channel], _FLOOR)
        ax.semilogy(series.times, err, label=label, lw=1.0)
    return _finish(fig, ax, path, "time (sec)",
                   "relative output error", title)
