"""Stripping: prune the most negative live fan-in weights of dead neurons."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .detection import DeadSet
from .errors import ConfigError, UsageError
from .network import DenseNetwork
from .optimizer import AdamState


@dataclass(frozen=True)
class StrippingPolicy:
    fraction: float = 0.10
    min_remaining: int = 1
    cadence: int = 1

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ConfigError(f"stripping fraction must lie in (0, 1], got {self.fraction}")
        if self.min_remaining < 0:
            raise ConfigError("min_remaining must be >= 0")
        if self.cadence < 1:
            raise ConfigError("cadence must be >= 1")

    def due(self, epoch: int) -> bool:
        """Whether a stripping pass runs after the 0-based ``epoch``."""
        return (epoch + 1) % self.cadence == 0

    def prune_count(self, remaining: int) -> int:
        # Round before ceil so e.g. 0.1 * 30 (= 3.0000000000000004) prunes 3, not 4.
        n = math.ceil(round(self.fraction * remaining, 9))
        return max(0, min(n, remaining - self.min_remaining))


@dataclass
class LayerStripRecord:
    dead: list[int]
    pruned: int
    cumulative: int


@dataclass
class StrippingReport:
    epoch: int
    layers: list[LayerStripRecord] = field(default_factory=list)

    @property
    def dead_count(self) -> int:
        return sum(len(r.dead) for r in self.layers)

    @property
    def pruned(self) -> int:
        return sum(r.pruned for r in self.layers)

    @property
    def cumulative(self) -> int:
        return sum(r.cumulative for r in self.layers)


def pruned_total(net: DenseNetwork) -> int:
    return int(sum(np.count_nonzero(layer.mask == 0.0) for layer in net.layers))


def select_prunable(weights: np.ndarray, live: np.ndarray, count: int) -> np.ndarray:
    """Rows of the ``count`` most negative live weights; ties go to the lower row."""
    rows = np.flatnonzero(live)
    order = np.argsort(weights[rows], kind="stable")
    return rows[order[:count]]


def strip(net: DenseNetwork, dead: DeadSet, policy: StrippingPolicy,
          state: AdamState | None = None, epoch: int = 0) -> StrippingReport:
    """Prune fan-in weights of every neuron in ``dead``, in place.

    For each dead neuron, ``policy.prune_count`` of its remaining unmasked
    incoming weights are removed, most negative first. Pruned weights and any
    Adam moments at those positions are set to zero.
    """
    dead.validate(net)
    for i, ix in enumerate(dead.indices):
        if len(ix) and not net.layers[i].activation.can_die:
            raise UsageError(f"hidden layer {i} uses {net.layers[i].activation}; only ReLU neurons can be stripped")

    report = StrippingReport(epoch=epoch)
    for i, ix in enumerate(dead.indices):
        layer = net.layers[i]
        pruned_here = 0
        for j in ix:
            live = layer.mask[:, j] != 0.0
            n = policy.prune_count(int(np.count_nonzero(live)))
            if n == 0:
                continue
            rows = select_prunable(layer.weights[:, j], live, n)
            layer.mask[rows, j] = 0.0
            layer.weights[rows, j] = 0.0
            if state is not None:
                state.reset_positions(i, rows, j)
            pruned_here += len(rows)
        report.layers.append(LayerStripRecord(
            dead=[int(j) for j in ix], pruned=pruned_here,
            cumulative=int(np.count_nonzero(layer.mask == 0.0))))
    return report
