"""Figure rendering for the CLI report paths.

Each report command writes its delimited output and, unless told not to,
a matplotlib figure next to it.  Uses the Agg backend so rendering works
headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_sweep(
    sigmas: np.ndarray,
    means: np.ndarray,
    stds: np.ndarray,
    path: str | Path,
    label: str = "",
) -> Path:
    """Mean estimate with one-standard-deviation bars across bandwidths."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(sigmas, means, yerr=stds, marker="o", capsize=3, label=label or None)
    ax.set_xscale("log")
    ax.set_xlabel(r"bandwidth $\sigma$")
    ax.set_ylabel("squared MMD estimate")
    ax.grid(alpha=0.3)
    if label:
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_type2(cells: Sequence, path: str | Path) -> Path:
    """Type II error over the (epsilon, basis count) grid.

    One line per epsilon when several basis counts are present, otherwise
    error against epsilon.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    epsilons = sorted({c.epsilon for c in cells})
    basis_counts = sorted({c.basis_count for c in cells})
    if len(basis_counts) > 1:
        for eps in epsilons:
            pts = sorted(
                [(c.basis_count, c.type2_error) for c in cells if c.epsilon == eps]
            )
            ax.plot(*zip(*pts), marker="o", label=f"eps={eps:g}")
        ax.set_xscale("log", base=2)
        ax.set_xlabel("number of basis functions L")
    else:
        pts = sorted([(c.epsilon, c.type2_error) for c in cells])
        ax.plot(*zip(*pts), marker="o", label=f"L={basis_counts[0]}")
        ax.set_xlabel(r"eigenvalue ratio $\epsilon$")
    ax.set_ylabel("Type II error")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_bench(rows: Sequence[dict], path: str | Path) -> Path:
    """Wall time against sample count (or dimension), log-log, per method."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    methods = sorted({r["method"] for r in rows})
    sizes = sorted({int(r["N"]) for r in rows})
    x_key, x_label = ("N", "number of samples N")
    if len(sizes) == 1:
        x_key, x_label = ("d", "dimension d")
    for method in methods:
        pts = sorted(
            (int(r[x_key]), float(r["wall_time_ms"]))
            for r in rows
            if r["method"] == method
        )
        ax.plot(*zip(*pts), marker="o", label=method)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel("wall time (ms)")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
