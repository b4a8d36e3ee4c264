"""Masked multilayer perceptron with manual backpropagation.

Every layer keeps a dense 0/1 mask next to its weights. Masked weights are
held at exactly zero and receive exactly-zero gradients, so a pruned
connection never comes back.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import tensor
from .activations import IDENTITY, RELU, ActivationKind, apply, derivative
from .errors import ConfigError, DataError, ShapeError

INIT_SCHEMES = ("kaiming_uniform", "kaiming_normal", "xavier_uniform")


@dataclass
class Layer:
    """One fully connected layer; ``weights`` and ``mask`` are fan_in x fan_out."""

    weights: np.ndarray
    bias: np.ndarray
    mask: np.ndarray
    activation: ActivationKind

    @property
    def fan_in(self) -> int:
        return self.weights.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[1]

    def effective_weights(self) -> np.ndarray:
        return tensor.hadamard(self.weights, self.mask)

    def check(self):
        if self.mask.shape != self.weights.shape:
            raise ShapeError(f"mask shape {self.mask.shape} != weight shape {self.weights.shape}")
        if self.bias.shape != (self.fan_out,):
            raise ShapeError(f"bias shape {self.bias.shape} does not match fan_out {self.fan_out}")
        if not np.all((self.mask == 0.0) | (self.mask == 1.0)):
            raise ConfigError("mask entries must be 0 or 1")


@dataclass
class DenseNetwork:
    layers: list[Layer]
    seed: int | None = None

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("a network needs at least one layer")
        for layer in self.layers:
            layer.check()
        for i, (a, b) in enumerate(zip(self.layers, self.layers[1:])):
            if a.fan_out != b.fan_in:
                raise ShapeError(f"layer {i} outputs {a.fan_out} values but layer {i + 1} expects {b.fan_in}")

    @property
    def widths(self) -> list[int]:
        return [self.layers[0].fan_in] + [layer.fan_out for layer in self.layers]

    @property
    def hidden_widths(self) -> list[int]:
        return [layer.fan_out for layer in self.layers[:-1]]

    @property
    def n_classes(self) -> int:
        return self.layers[-1].fan_out

    def copy(self) -> "DenseNetwork":
        return copy.deepcopy(self)

    def enforce_masks(self):
        """Hard-zero every masked weight."""
        for layer in self.layers:
            layer.weights[layer.mask == 0.0] = 0.0


@dataclass
class ForwardTrace:
    inputs: np.ndarray
    pre: list[np.ndarray] = field(default_factory=list)
    post: list[np.ndarray] = field(default_factory=list)

    @property
    def logits(self) -> np.ndarray:
        return self.post[-1]

    @property
    def hidden_post(self) -> list[np.ndarray]:
        return self.post[:-1]


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.weights + self.biases)


def init(widths, activation: ActivationKind = RELU, seed: int = 0,
         scheme: str = "kaiming_uniform") -> DenseNetwork:
    """Initialize an MLP with the given layer widths (input, hidden..., output).

    Hidden layers use ``activation``; the output layer produces raw logits.
    Biases start at zero and all masks at one.
    """
    widths = list(widths)
    if len(widths) < 2:
        raise ConfigError(f"need at least an input and an output width, got {widths}")
    if any(int(w) <= 0 for w in widths):
        raise ConfigError(f"layer widths must be positive, got {widths}")
    if scheme not in INIT_SCHEMES:
        raise ConfigError(f"unknown init scheme {scheme!r}; expected one of {INIT_SCHEMES}")

    rng = np.random.default_rng(seed)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        if scheme == "kaiming_uniform":
            bound = np.sqrt(6.0 / fan_in)
            w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        elif scheme == "kaiming_normal":
            w = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))
        else:
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        act = activation if i < len(widths) - 2 else IDENTITY
        layers.append(Layer(weights=w.astype(np.float64), bias=np.zeros(fan_out),
                            mask=np.ones((fan_in, fan_out)), activation=act))
    return DenseNetwork(layers, seed=seed)


def forward(net: DenseNetwork, batch: np.ndarray) -> ForwardTrace:
    batch = tensor.as_matrix(batch)
    if batch.shape[1] != net.layers[0].fan_in:
        raise ShapeError(f"batch has {batch.shape[1]} features, network expects {net.layers[0].fan_in}")
    trace = ForwardTrace(inputs=batch)
    h = batch
    for layer in net.layers:
        z = tensor.add_row(tensor.matmul(h, layer.effective_weights()), layer.bias)
        h = apply(layer.activation, z)
        trace.pre.append(z)
        trace.post.append(h)
    return trace


def _check_labels(labels, n_rows, n_classes):
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.shape[0] != n_rows:
        raise ShapeError(f"expected {n_rows} labels, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise DataError("labels must be integer class indices")
    if n_rows and (labels.min() < 0 or labels.max() >= n_classes):
        raise DataError(f"label out of range [0, {n_classes})")
    return labels.astype(np.int64)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def backward(net: DenseNetwork, trace: ForwardTrace, labels) -> Gradients:
    """Gradients of the mean softmax cross-entropy with respect to every parameter."""
    logits = trace.logits
    n = logits.shape[0]
    labels = _check_labels(labels, n, net.n_classes)
    if n == 0:
        raise ShapeError("cannot backpropagate an empty batch")

    probs = np.exp(log_softmax(logits))
    probs[np.arange(n), labels] -= 1.0
    delta = probs / n  # d loss / d logits

    grad_w = [None] * len(net.layers)
    grad_b = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        delta = delta * derivative(layer.activation, trace.pre[i])
        below = trace.inputs if i == 0 else trace.post[i - 1]
        grad_w[i] = tensor.hadamard(tensor.matmul(tensor.transpose(below), delta), layer.mask)
        grad_b[i] = tensor.row_sum(delta)
        if i > 0:
            delta = tensor.matmul(delta, tensor.transpose(layer.effective_weights()))
    return Gradients(grad_w, grad_b)


def loss_and_accuracy(net: DenseNetwork, batch: np.ndarray, labels) -> tuple[float, float]:
    """Mean negative log-likelihood and top-1 accuracy on a batch."""
    return loss_and_accuracy_from_logits(forward(net, batch).logits, labels)


def loss_and_accuracy_from_logits(logits: np.ndarray, labels) -> tuple[float, float]:
    n = logits.shape[0]
    labels = _check_labels(labels, n, logits.shape[1])
    if n == 0:
        raise ShapeError("empty batch")
    nll = -log_softmax(logits)[np.arange(n), labels].mean()
    acc = float(np.mean(tensor.argmax_rows(logits) == labels))
    return float(nll), acc


def hidden_layer_count(net: DenseNetwork) -> int:
    return len(net.layers) - 1
