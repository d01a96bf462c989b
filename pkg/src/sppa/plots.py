"""SVG figure emission for experiment runs.

All figures are written as self-contained SVG files through the Agg
backend, with a fixed hash salt and no date metadata so reruns are
reproducible.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "sppa"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "save_gap_loglog",
    "save_series",
    "save_scaled_gap",
    "save_phase_portrait",
]

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def _positive(ks, vals):
    ks = np.asarray(ks, dtype=float)
    vals = np.asarray(vals, dtype=float)
    mask = (ks > 0) & (vals > 0) & np.isfinite(vals)
    return ks[mask], vals[mask]


def save_gap_loglog(path, series: dict) -> None:
    """Objective gap against iteration on log-log axes, one line per label."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, (ks, gaps) in series.items():
        ks_p, gaps_p = _positive(ks, gaps)
        if ks_p.size:
            ax.loglog(ks_p, gaps_p, label=label)
    ax.set_xlabel("iteration k")
    ax.set_ylabel("objective gap")
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend(fontsize=8)
    _finish(fig, path)


def save_series(path, xs, values, xlabel: str, ylabel: str, logy: bool = False) -> None:
    """Single diagnostic series (e.g. Lyapunov energy against k or t)."""
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    if logy:
        mask = values > 0
        ax.semilogy(xs[mask], values[mask])
    else:
        ax.plot(xs, values)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def save_scaled_gap(path, ks, scaled) -> None:
    """Rate-scaled gap A_k * (f(x_k) - f*) against k on a log-y axis."""
    save_series(path, ks, scaled, "iteration k", "A_k * gap", logy=True)


def save_phase_portrait(path, trajectories: dict) -> None:
    """Phase-space (p, q) trajectories overlaid on the exact unit circle."""
    fig, ax = plt.subplots(figsize=(4.6, 4.6))
    theta = np.linspace(0.0, 2.0 * np.pi, 512)
    ax.plot(np.cos(theta), np.sin(theta), color="black", lw=1.0,
            label="exact (unit circle)")
    for label, pq in trajectories.items():
        pq = np.asarray(pq, dtype=float)
        ax.plot(pq[:, 1], pq[:, 0], lw=0.8, label=label)
    ax.set_xlabel("q")
    ax.set_ylabel("p")
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, loc="upper right")
    _finish(fig, path)
