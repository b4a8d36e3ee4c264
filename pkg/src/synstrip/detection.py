"""Dead-neuron detection from summed forward activations.

A ledger keeps one running sum of post-activation outputs per hidden neuron.
After a pass over an evaluation set, any ReLU neuron whose sum does not
exceed the threshold is dead (with the default threshold of 0 that means it
output exactly zero on every sample).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensor
from .errors import ConfigError, ShapeError, UsageError
from .network import DenseNetwork, ForwardTrace, forward

SOURCES = ("validation", "training")


@dataclass
class ActivationLedger:
    sums: list[np.ndarray]
    eligible: list[bool]
    samples_seen: int = 0

    @classmethod
    def for_network(cls, net: DenseNetwork) -> "ActivationLedger":
        hidden = net.layers[:-1]
        return cls(sums=[np.zeros(layer.fan_out) for layer in hidden],
                   eligible=[layer.activation.can_die for layer in hidden])


@dataclass
class DeadSet:
    """Dead neuron indices per hidden layer, each sorted ascending."""

    indices: list[np.ndarray]
    threshold: float = 0.0
    source: str = "validation"
    fan_outs: list[int] = field(default_factory=list)

    @classmethod
    def empty(cls, net: DenseNetwork, source="validation") -> "DeadSet":
        return cls([np.zeros(0, dtype=np.int64) for _ in net.layers[:-1]], 0.0, source,
                   net.hidden_widths)

    @classmethod
    def from_lists(cls, net: DenseNetwork, per_layer, threshold=0.0, source="validation") -> "DeadSet":
        idx = [np.array(sorted(set(int(j) for j in layer)), dtype=np.int64) for layer in per_layer]
        dead = cls(idx, threshold, source, net.hidden_widths)
        dead.validate(net)
        return dead

    @property
    def count(self) -> int:
        return int(sum(len(ix) for ix in self.indices))

    def per_layer_counts(self) -> list[int]:
        return [len(ix) for ix in self.indices]

    def contains(self, layer: int, neuron: int) -> bool:
        ix = self.indices[layer]
        pos = np.searchsorted(ix, neuron)
        return bool(pos < len(ix) and ix[pos] == neuron)

    def validate(self, net: DenseNetwork):
        widths = net.hidden_widths
        if len(self.indices) != len(widths):
            raise UsageError(f"dead set covers {len(self.indices)} hidden layers, network has {len(widths)}")
        for i, (ix, width) in enumerate(zip(self.indices, widths)):
            if len(ix) and (ix[0] < 0 or ix[-1] >= width):
                raise UsageError(f"dead index out of range in hidden layer {i} (width {width})")
            if np.any(np.diff(ix) <= 0):
                raise UsageError(f"dead indices in hidden layer {i} must be strictly increasing")


def accumulate(ledger: ActivationLedger, trace: ForwardTrace) -> ActivationLedger:
    """Add a batch's hidden post-activations into the ledger (in place)."""
    hidden = trace.hidden_post
    if len(hidden) != len(ledger.sums):
        raise ShapeError(f"trace has {len(hidden)} hidden layers, ledger has {len(ledger.sums)}")
    for i, post in enumerate(hidden):
        if post.shape[1] != ledger.sums[i].shape[0]:
            raise ShapeError(f"hidden layer {i}: width {post.shape[1]} != ledger width {ledger.sums[i].shape[0]}")
    for i, post in enumerate(hidden):
        ledger.sums[i] += tensor.row_sum(post)
    ledger.samples_seen += trace.inputs.shape[0]
    return ledger


def find_dead(ledger: ActivationLedger, threshold: float = 0.0, source: str = "validation") -> DeadSet:
    """Neurons whose summed activation is <= ``threshold``; ReLU layers only."""
    if ledger.samples_seen <= 0:
        raise UsageError("activation ledger is empty; run an evaluation pass first")
    if threshold < 0:
        raise ConfigError(f"detection threshold must be >= 0, got {threshold}")
    if source not in SOURCES:
        raise ConfigError(f"unknown detection source {source!r}")
    indices = []
    for sums, eligible in zip(ledger.sums, ledger.eligible):
        if eligible:
            indices.append(np.flatnonzero(sums <= threshold).astype(np.int64))
        else:
            indices.append(np.zeros(0, dtype=np.int64))
    return DeadSet(indices, float(threshold), source, [len(s) for s in ledger.sums])


def batches(n: int, batch_size: int):
    """Fixed sequential partition of ``range(n)`` into slices."""
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    for start in range(0, n, batch_size):
        yield slice(start, min(start + batch_size, n))


def scan(net: DenseNetwork, features: np.ndarray, batch_size: int = 1024, on_batch=None) -> ActivationLedger:
    """Run ``net`` over ``features`` in a fixed batch order and fill a ledger.

    ``on_batch(slice, trace)`` is called for every batch, which lets callers
    reuse the same pass for loss/accuracy bookkeeping.
    """
    ledger = ActivationLedger.for_network(net)
    for sl in batches(features.shape[0], batch_size):
        trace = forward(net, features[sl])
        accumulate(ledger, trace)
        if on_batch is not None:
            on_batch(sl, trace)
    return ledger


def detect(net: DenseNetwork, features: np.ndarray, threshold: float = 0.0,
           source: str = "validation", batch_size: int = 1024) -> DeadSet:
    return find_dead(scan(net, features, batch_size), threshold, source)
