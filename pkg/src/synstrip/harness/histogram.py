"""Per-neuron fan-in weight histograms, recorded once per epoch."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import UsageError
from ..network import DenseNetwork

HEADER = ["epoch", "bin_lo", "bin_hi", "count", "pruned", "mean"]


@dataclass
class HistogramRecord:
    layer: int
    neuron: int
    edges: np.ndarray
    counts: np.ndarray
    pruned: int
    mean: float
    epoch: int = -1


def dump_neuron_histogram(net: DenseNetwork, layer: int, neuron: int, bins: int = 10,
                          epoch: int = -1) -> HistogramRecord:
    """Histogram of the unmasked fan-in weights of one hidden neuron.

    Bins are equal width over [min, max] of the remaining weights.
    """
    n_hidden = len(net.layers) - 1
    if not 0 <= layer < n_hidden:
        raise UsageError(f"layer {layer} is not a hidden layer (0..{n_hidden - 1})")
    if not 0 <= neuron < net.layers[layer].fan_out:
        raise UsageError(f"neuron {neuron} out of range for layer {layer}")
    if bins < 1:
        raise UsageError("bins must be >= 1")
    col = net.layers[layer].weights[:, neuron]
    live = net.layers[layer].mask[:, neuron] != 0.0
    remaining = col[live]
    if remaining.size:
        counts, edges = np.histogram(remaining, bins=bins)
        mean = float(remaining.mean())
    else:
        counts, edges = np.zeros(bins, dtype=np.int64), np.linspace(0.0, 0.0, bins + 1)
        mean = float("nan")
    return HistogramRecord(layer, neuron, edges, counts.astype(np.int64),
                           int(np.count_nonzero(~live)), mean, epoch)


class HistogramWriter:
    """Appends one CSV block per epoch for each tracked neuron."""

    def __init__(self, out_dir, tracked, bins: int):
        self.out_dir = Path(out_dir)
        self.tracked = [tuple(t) for t in tracked]
        self.bins = bins
        self.records: dict[tuple[int, int], list[HistogramRecord]] = {t: [] for t in self.tracked}

    def path_for(self, layer: int, neuron: int) -> Path:
        return self.out_dir / f"hist_L{layer}_N{neuron}.csv"

    def start(self):
        for layer, neuron in self.tracked:
            with open(self.path_for(layer, neuron), "w", newline="") as fh:
                csv.writer(fh, lineterminator="\n").writerow(HEADER)

    def record(self, net: DenseNetwork, epoch: int):
        for layer, neuron in self.tracked:
            rec = dump_neuron_histogram(net, layer, neuron, self.bins, epoch)
            self.records[(layer, neuron)].append(rec)
            with open(self.path_for(layer, neuron), "a", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                for lo, hi, c in zip(rec.edges[:-1], rec.edges[1:], rec.counts):
                    w.writerow([epoch, repr(float(lo)), repr(float(hi)), int(c), rec.pruned, repr(rec.mean)])
