"""Active-parameter accounting.

Scope is every weight in the network (input->hidden, hidden->hidden and
hidden->output) plus every hidden bias; output biases attach to no hidden
neuron and are left out. Each in-scope parameter falls in exactly one bucket:

* pruned        -- masked weight
* dead_attached -- unmasked weight whose source or target is a dead hidden
                   neuron, or the bias of a dead neuron
* active        -- everything else
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detection import DeadSet
from .network import DenseNetwork


@dataclass(frozen=True)
class CapacityReport:
    total_params: int
    pruned_params: int
    dead_attached_params: int
    active_params: int
    dead_neurons: int

    @property
    def active_pct(self) -> float:
        return 100.0 * self.active_params / self.total_params if self.total_params else 100.0


def inactive_masks(net: DenseNetwork, dead: DeadSet):
    """Boolean masks over (weights, biases) of each layer.

    Returns ``(pruned_w, dead_w, dead_b)`` lists. ``dead_w`` excludes pruned
    positions so the buckets are disjoint; output-layer ``dead_b`` is all False.
    """
    dead.validate(net)
    n_hidden = len(net.layers) - 1
    pruned_w, dead_w, dead_b = [], [], []
    for i, layer in enumerate(net.layers):
        src = np.zeros(layer.fan_in, dtype=bool)
        dst = np.zeros(layer.fan_out, dtype=bool)
        if i > 0:
            src[dead.indices[i - 1]] = True
        if i < n_hidden:
            dst[dead.indices[i]] = True
        pruned = layer.mask == 0.0
        attached = src[:, None] | dst[None, :]
        pruned_w.append(pruned)
        dead_w.append(attached & ~pruned)
        dead_b.append(dst.copy())
    return pruned_w, dead_w, dead_b


def active_parameters(net: DenseNetwork, dead: DeadSet) -> CapacityReport:
    pruned_w, dead_w, dead_b = inactive_masks(net, dead)
    n_hidden = len(net.layers) - 1
    total = sum(layer.weights.size for layer in net.layers)
    total += sum(layer.fan_out for layer in net.layers[:n_hidden])
    pruned = int(sum(np.count_nonzero(p) for p in pruned_w))
    attached = int(sum(np.count_nonzero(d) for d in dead_w))
    attached += int(sum(np.count_nonzero(b) for b in dead_b[:n_hidden]))
    return CapacityReport(total_params=int(total), pruned_params=pruned,
                          dead_attached_params=attached,
                          active_params=int(total) - pruned - attached,
                          dead_neurons=dead.count)


def zero_inactive(net: DenseNetwork, dead: DeadSet) -> DenseNetwork:
    """Copy of ``net`` with every inactive parameter set to zero."""
    out = net.copy()
    pruned_w, dead_w, dead_b = inactive_masks(net, dead)
    for layer, p, d, b in zip(out.layers, pruned_w, dead_w, dead_b):
        layer.weights[p | d] = 0.0
        layer.bias[b] = 0.0
    return out
