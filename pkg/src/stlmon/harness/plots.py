"""Matplotlib rendering of interval plots alongside the CSV artifacts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_intervals(rows, path, title, zero=0.0):
    """Per-state empirical quantile range, raw interval and calibrated
    interval; rows is a list of dicts from the plot-data stage."""
    n = len(rows)
    x = np.arange(n)
    fig, ax = plt.subplots(figsize=(max(8, n * 0.25), 4.5))
    for i, r in enumerate(rows):
        ax.vlines(i - 0.15, r["eqr_lo"], r["eqr_hi"], color="tab:gray", lw=3,
                  label="empirical range" if i == 0 else None)
        ax.vlines(i, r["pi_lo"], r["pi_hi"], color="tab:blue", lw=2,
                  label="raw interval" if i == 0 else None)
        ax.vlines(i + 0.15, r["cpi_lo"], r["cpi_hi"], color="tab:orange", lw=2,
                  label="calibrated interval" if i == 0 else None)
    ax.plot(x, [r["q_med"] for r in rows], "k.", ms=4, label="predicted median")
    ax.axhline(zero, color="red", lw=0.8, ls="--", label="zero robustness")
    ax.set_xlabel("test state")
    ax.set_ylabel("robustness (scaled)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_sequential(rows, path, title, zero=0.0):
    """Calibrated interval and empirical range along one trajectory."""
    t = np.array([r["step"] for r in rows])
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.fill_between(t, [r["cpi_lo"] for r in rows], [r["cpi_hi"] for r in rows],
                    color="tab:orange", alpha=0.3, label="calibrated interval")
    ax.plot(t, [r["eqr_lo"] for r in rows], color="tab:gray", lw=1, ls=":")
    ax.plot(t, [r["eqr_hi"] for r in rows], color="tab:gray", lw=1, ls=":",
            label="empirical range")
    ax.plot(t, [r["q_med"] for r in rows], "k-", lw=1, label="predicted median")
    ax.axhline(zero, color="red", lw=0.8, ls="--", label="zero robustness")
    ax.set_xlabel("trajectory step")
    ax.set_ylabel("robustness (scaled)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
