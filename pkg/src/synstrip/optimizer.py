"""Mask-aware Adam and per-epoch learning-rate schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, ShapeError
from .network import DenseNetwork, Gradients

SCHEDULE_KINDS = ("constant", "cosine", "warmup_cosine")


@dataclass
class AdamState:
    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_network(cls, net: DenseNetwork, beta1=0.9, beta2=0.999, epsilon=1e-8) -> "AdamState":
        return cls(
            m_w=[np.zeros_like(layer.weights) for layer in net.layers],
            v_w=[np.zeros_like(layer.weights) for layer in net.layers],
            m_b=[np.zeros_like(layer.bias) for layer in net.layers],
            v_b=[np.zeros_like(layer.bias) for layer in net.layers],
            beta1=beta1, beta2=beta2, epsilon=epsilon,
        )

    def reset_positions(self, layer_index: int, rows, cols):
        """Zero both moment estimates at the given weight positions."""
        self.m_w[layer_index][rows, cols] = 0.0
        self.v_w[layer_index][rows, cols] = 0.0


def adam_step(net: DenseNetwork, grads: Gradients, state: AdamState, lr: float,
              weight_decay: float = 0.0):
    """One bias-corrected Adam update, in place on ``net`` and ``state``.

    Weight decay is decoupled and applies to unmasked weights only (never to
    biases). Masked weights and their moments are hard-zeroed afterwards.
    """
    if lr < 0:
        raise ConfigError(f"learning rate must be non-negative, got {lr}")
    if len(grads.weights) != len(net.layers):
        raise ShapeError("gradient layer count does not match the network")
    if not grads.all_finite():
        raise NumericError("non-finite gradient entry")

    state.step_count += 1
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    corr1 = 1.0 - b1 ** state.step_count
    corr2 = 1.0 - b2 ** state.step_count

    for i, layer in enumerate(net.layers):
        gw, gb = grads.weights[i], grads.biases[i]
        if gw.shape != layer.weights.shape or gb.shape != layer.bias.shape:
            raise ShapeError(f"layer {i}: gradient shapes {gw.shape}/{gb.shape} do not match parameters")
        pruned = layer.mask == 0.0

        m, v = state.m_w[i], state.v_w[i]
        m *= b1
        m += (1.0 - b1) * gw
        v *= b2
        v += (1.0 - b2) * gw * gw
        update = (m / corr1) / (np.sqrt(v / corr2) + eps)
        if weight_decay:
            update = update + weight_decay * layer.weights
        layer.weights -= lr * update
        layer.weights[pruned] = 0.0
        m[pruned] = 0.0
        v[pruned] = 0.0

        m, v = state.m_b[i], state.v_b[i]
        m *= b1
        m += (1.0 - b1) * gb
        v *= b2
        v += (1.0 - b2) * gb * gb
        layer.bias -= lr * ((m / corr1) / (np.sqrt(v / corr2) + eps))


@dataclass(frozen=True)
class ScheduleSpec:
    kind: str = "constant"
    lr_max: float = 1e-3
    lr_min: float = 0.0
    warmup_epochs: int = 0
    total_epochs: int = 50

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigError(f"unknown schedule {self.kind!r}; expected one of {SCHEDULE_KINDS}")
        if self.total_epochs < 1:
            raise ConfigError("total_epochs must be at least 1")
        if self.lr_min > self.lr_max:
            raise ConfigError(f"lr_min {self.lr_min} exceeds lr_max {self.lr_max}")
        if self.kind == "warmup_cosine":
            if not 0 <= self.warmup_epochs < self.total_epochs:
                raise ConfigError("warmup_epochs must be in [0, total_epochs)")
        elif self.warmup_epochs:
            raise ConfigError(f"schedule {self.kind!r} has no warmup phase")


def lr_at(schedule: ScheduleSpec, epoch: int) -> float:
    """Learning rate for a 0-based epoch index."""
    if not 0 <= epoch < schedule.total_epochs:
        raise ConfigError(f"epoch {epoch} outside [0, {schedule.total_epochs})")
    if schedule.kind == "constant":
        return schedule.lr_max
    warmup = schedule.warmup_epochs if schedule.kind == "warmup_cosine" else 0
    if epoch < warmup:
        return schedule.lr_max * (epoch + 1) / warmup
    t = epoch - warmup
    span = schedule.total_epochs - warmup - 1
    if span == 0:
        return schedule.lr_max
    cos = math.cos(math.pi * t / span)
    return schedule.lr_min + 0.5 * (schedule.lr_max - schedule.lr_min) * (1.0 + cos)
