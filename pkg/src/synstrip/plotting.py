"""Matplotlib figures written next to the CSV outputs.

Everything renders off-screen (Agg) straight to PNG files.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "figure.dpi": 100,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.4,
    "svg.hashsalt": "synstrip",
}


def newfig(ncols=1, nrows=1, width=3.2, height=2.6):
    with plt.rc_context(RC):
        fig, axes = plt.subplots(nrows, ncols, figsize=(width * ncols, height * nrows), squeeze=False)
    return fig, axes


def savefig(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(RC):
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_training_curves(metrics, path) -> Path:
    """Validation accuracy, dead neurons and active parameters against epoch."""
    epochs = [m.epoch + 1 for m in metrics]
    fig, ax = newfig(ncols=3)
    ax[0, 0].plot(epochs, [100 * m.val_acc for m in metrics], color="C0", label="val")
    ax[0, 0].plot(epochs, [100 * m.test_acc for m in metrics], color="C1", ls="--", label="test")
    ax[0, 0].set(xlabel="epoch", ylabel="accuracy (%)")
    ax[0, 0].legend(frameon=False)
    ax[0, 1].plot(epochs, [m.dead_count for m in metrics], color="C3")
    ax[0, 1].set(xlabel="epoch", ylabel="dead neurons")
    ax[0, 2].plot(epochs, [m.active_pct for m in metrics], color="C2")
    ax[0, 2].set(xlabel="epoch", ylabel="active parameters (%)")
    return savefig(fig, path)


def plot_histogram_evolution(records, path, title="") -> Path:
    """Stacked per-epoch fan-in histograms for one neuron."""
    records = list(records)
    fig, axes = newfig(width=4.0, height=0.45 * max(len(records), 4) + 0.8)
    ax = axes[0, 0]
    cmap = plt.get_cmap("viridis")
    for k, rec in enumerate(records):
        if rec.counts.sum() == 0:
            continue
        scale = 0.8 / rec.counts.max()
        centers = 0.5 * (rec.edges[:-1] + rec.edges[1:])
        width = np.diff(rec.edges)
        ax.bar(centers, rec.counts * scale, width=width, bottom=k,
               color=cmap(k / max(len(records) - 1, 1)), edgecolor="none", alpha=0.85)
    ax.axvline(0.0, color="0.4", lw=0.8, ls=":")
    ax.set(xlabel="fan-in weight", ylabel="epoch", title=title)
    ax.set_yticks(range(len(records)))
    ax.set_yticklabels([str(r.epoch + 1) for r in records])
    return savefig(fig, path)


def plot_grid_dead_counts(rows, path) -> Path:
    """Median dead-neuron count against width, one line per depth and mode.

    Baseline runs are solid, stripping runs dashed.
    """
    groups = defaultdict(lambda: defaultdict(list))
    for r in rows:
        if r.status == "ok":
            groups[(r.depth, r.mode)][r.width].append(r.dead)
    fig, axes = newfig(width=4.0, height=3.0)
    ax = axes[0, 0]
    depths = sorted({d for d, _ in groups})
    for (depth, mode), by_width in sorted(groups.items()):
        widths = sorted(by_width)
        med = [float(np.median(by_width[w])) for w in widths]
        color = f"C{depths.index(depth)}"
        ax.plot(widths, med, marker="o", color=color, ls="-" if mode == "baseline" else "--",
                label=f"L={depth} {mode}")
    ax.set(xlabel="hidden width", ylabel="dead neurons (median)")
    if groups:
        ax.set_xscale("log", base=2)
        ax.legend(frameon=False)
    return savefig(fig, path)


def plot_grid_dead_over_time(histories, path) -> Path:
    """Dead-neuron count per epoch for each grid cell (first seed only)."""
    fig, axes = newfig(width=4.0, height=3.0)
    ax = axes[0, 0]
    for k, ((depth, width, mode), counts) in enumerate(sorted(histories.items())):
        ax.plot(np.arange(1, len(counts) + 1), counts, color=f"C{k // 2 % 10}",
                ls="-" if mode == "baseline" else "--", label=f"L={depth} N={width} {mode}")
    ax.set(xlabel="epoch", ylabel="dead neurons")
    if histories:
        ax.legend(frameon=False, ncol=1)
    return savefig(fig, path)
