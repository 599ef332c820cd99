"""Figure rendering for the report-producing commands.

Everything draws through the Agg backend straight to files; nothing here
opens a window.  Figures are a convenience layer over the delimited outputs,
never a data source.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_f_curve",
    "plot_vn_landscape",
    "plot_gap_sweep",
    "plot_root_count_hist",
    "plot_certificate_margins",
]

_DPI = 130


def plot_f_curve(ts, f, fp, fpp, path: str) -> str:
    fig, axes = plt.subplots(3, 1, figsize=(7, 8), sharex=True)
    for ax, ys, label in zip(axes, (f, fp, fpp), ("f", "f'", "f''")):
        ax.axhline(0.0, color="0.75", lw=0.8)
        ax.plot(ts, ys, lw=1.4)
        ax.set_ylabel(label)
        ax.grid(alpha=0.25)
    axes[-1].set_xlabel("t")
    axes[0].set_title("stationarity function and derivatives")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_vn_landscape(states, best_theta: float, best_bits: float, path: str) -> str:
    from .optimizer import _bloch, _vn_grid_values

    thetas = np.linspace(0.0, math.pi, 2048, endpoint=False)
    vals = _vn_grid_values(_bloch(states), thetas)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(thetas, vals, lw=1.2)
    ax.plot([best_theta], [best_bits], "o", ms=6, color="crimson", label="optimum")
    ax.set_xlabel("measurement angle (rad)")
    ax.set_ylabel("mutual information (bits)")
    ax.set_title("orthogonal-measurement landscape")
    ax.grid(alpha=0.25)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_gap_sweep(gaps, path: str) -> str:
    a = np.abs(np.asarray(gaps, float))
    floor = 1e-18
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.hist(np.log10(np.maximum(a, floor)), bins=40, color="steelblue", alpha=0.85)
    ax.axvline(-6, color="crimson", lw=1.2, ls="--", label="tolerance (1e-6)")
    ax.set_xlabel("log10 |gap| (bits)")
    ax.set_ylabel("pairs")
    ax.set_title("3-outcome vs orthogonal optimum gap")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_root_count_hist(counts, path: str) -> str:
    c = np.asarray(counts, int)
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = np.arange(-0.5, max(3, c.max() if c.size else 2) + 1.5)
    ax.hist(c, bins=bins, color="seagreen", alpha=0.85, rwidth=0.8)
    ax.axvline(2.5, color="crimson", lw=1.2, ls="--", label="bound (2)")
    ax.set_xlabel("real roots of f")
    ax.set_ylabel("parameter draws")
    ax.set_title("root-count certificate")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_certificate_margins(certs, path: str) -> str:
    margins = [c.margin for c in certs]
    counts = [c.root_count for c in certs]
    idx = np.arange(len(certs))
    fig, axes = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    axes[0].semilogy(idx, margins, ".", ms=2.5, color="steelblue")
    axes[0].axhline(1e-10, color="crimson", lw=1.0, ls="--", label="margin floor")
    axes[0].set_ylabel("relative |discriminant|")
    axes[0].legend()
    axes[1].plot(idx, counts, ".", ms=2.5, color="seagreen")
    axes[1].set_ylabel("root count of P")
    axes[1].set_xlabel("grid point index")
    axes[0].set_title("discriminant certificate over the parameter grid")
    for ax in axes:
        ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
