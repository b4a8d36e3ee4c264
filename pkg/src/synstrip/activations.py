"""Elementwise activation functions and their derivatives.

Only ReLU has an exact-zero plateau over an entire half line, so it is the
only activation for which a neuron can be declared dead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Stable tags; these are also the checkpoint encoding.
TAGS = {"relu": 0, "leaky_relu": 1, "gelu": 2, "identity": 3}


@dataclass(frozen=True)
class ActivationKind:
    name: str
    slope: float = 0.0

    def __post_init__(self):
        if self.name not in TAGS:
            raise ConfigError(f"unknown activation {self.name!r}; expected one of {sorted(TAGS)}")
        if self.name == "leaky_relu" and not 0.0 < self.slope < 1.0:
            raise ConfigError(f"leaky ReLU slope must lie in (0, 1), got {self.slope}")
        if self.name != "leaky_relu" and self.slope != 0.0:
            raise ConfigError(f"activation {self.name!r} takes no slope")

    @property
    def tag(self) -> int:
        return TAGS[self.name]

    @property
    def can_die(self) -> bool:
        """Whether dead-neuron detection and stripping apply to this activation."""
        return self.name == "relu"

    def __str__(self):
        return f"leaky_relu({self.slope:g})" if self.name == "leaky_relu" else self.name


RELU = ActivationKind("relu")
GELU = ActivationKind("gelu")
IDENTITY = ActivationKind("identity")


def leaky_relu(slope: float = 0.01) -> ActivationKind:
    return ActivationKind("leaky_relu", slope)


def parse_activation(text: str, slope: float | None = None) -> ActivationKind:
    """Build an :class:`ActivationKind` from a config string such as ``"relu"``."""
    name = text.strip().lower().replace("-", "_")
    if name in ("leakyrelu", "leaky"):
        name = "leaky_relu"
    if name == "leaky_relu":
        return leaky_relu(0.01 if slope is None else slope)
    return ActivationKind(name)


def from_tag(tag: int, slope: float = 0.0) -> ActivationKind:
    for name, t in TAGS.items():
        if t == tag:
            return ActivationKind(name, slope if name == "leaky_relu" else 0.0)
    raise ConfigError(f"unknown activation tag {tag}")


def _std_normal_cdf(x):
    # ndtr goes through erfc for x < 0, so the lower tail does not cancel to 0.
    return ndtr(x)


def apply(kind: ActivationKind, x):
    """Evaluate the activation elementwise. Accepts scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    if kind.name == "relu":
        out = np.where(x > 0.0, x, 0.0)
    elif kind.name == "leaky_relu":
        out = np.where(x > 0.0, x, kind.slope * x)
    elif kind.name == "gelu":
        out = x * _std_normal_cdf(x)
    else:
        out = x.copy()
    return out[()] if out.ndim == 0 else out


def derivative(kind: ActivationKind, x):
    """Derivative of the activation at ``x``; ReLU's derivative at 0 is 0."""
    x = np.asarray(x, dtype=np.float64)
    if kind.name == "relu":
        out = np.where(x > 0.0, 1.0, 0.0)
    elif kind.name == "leaky_relu":
        out = np.where(x > 0.0, 1.0, kind.slope)
    elif kind.name == "gelu":
        out = _std_normal_cdf(x) + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    else:
        out = np.ones_like(x)
    return out[()] if out.ndim == 0 else out
