import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from synstrip.activations import GELU, IDENTITY, RELU, ActivationKind, apply, derivative, leaky_relu, parse_activation
from synstrip.errors import ConfigError

# x * Phi(x) at x = 1 and d/dx at -1, 0.5, 2, evaluated with mpmath at 40 digits.
GELU_AT_1 = 0.8413447460685429
GELU_PRIME = {-1.0: -0.08331547058768630, 0.5: 0.8674951246561628, 2.0: 1.0852318010781969}

KINDS = [RELU, GELU, IDENTITY, leaky_relu(0.1)]


def test_relu_values():
    assert apply(RELU, -2.0) == 0.0
    assert apply(RELU, 3.5) == 3.5
    assert derivative(RELU, -1.0) == 0.0
    assert derivative(RELU, 2.0) == 1.0
    assert derivative(RELU, 0.0) == 0.0


def test_gelu_values():
    assert apply(GELU, 0.0) == 0.0
    assert apply(GELU, 1.0) == pytest.approx(GELU_AT_1, abs=1e-15)
    for x, d in GELU_PRIME.items():
        assert derivative(GELU, x) == pytest.approx(d, abs=1e-14)


@pytest.mark.parametrize("x", [-1.0, 0.5, 2.0])
def test_gelu_derivative_vs_central_difference(x):
    h = 1e-6
    fd = (apply(GELU, x + h) - apply(GELU, x - h)) / (2 * h)
    assert abs(derivative(GELU, x) - fd) < 1e-7


def test_leaky_and_identity():
    k = leaky_relu(0.2)
    assert apply(k, -2.0) == pytest.approx(-0.4)
    assert derivative(k, -2.0) == 0.2
    assert apply(IDENTITY, -3.0) == -3.0
    assert derivative(IDENTITY, 7.0) == 1.0


def test_vectorized_matches_scalar():
    x = np.linspace(-3, 3, 13)
    for kind in KINDS:
        np.testing.assert_array_equal(apply(kind, x), [apply(kind, v) for v in x])


def test_invalid_kinds():
    with pytest.raises(ConfigError):
        leaky_relu(1.5)
    with pytest.raises(ConfigError):
        ActivationKind("swish")
    with pytest.raises(ConfigError):
        ActivationKind("relu", 0.3)
    assert parse_activation("LeakyReLU", 0.05) == leaky_relu(0.05)
    assert not GELU.can_die and RELU.can_die


reals = st.floats(-50, 50, allow_nan=False)


@given(reals)
def test_relu_nonnegative_and_zero_iff_nonpositive(x):
    y = apply(RELU, x)
    assert y >= 0
    assert (y == 0) == (x <= 0)


@given(st.floats(-8, 8, allow_nan=False), st.sampled_from(KINDS))
def test_derivative_matches_finite_difference(x, kind):
    if kind.name in ("relu", "leaky_relu") and abs(x) < 1e-5:
        return  # kink
    h = 1e-6
    fd = (apply(kind, x + h) - apply(kind, x - h)) / (2 * h)
    assert abs(derivative(kind, x) - fd) < 1e-7


@given(st.floats(-30, -1e-3, allow_nan=False))
def test_gelu_has_no_zero_plateau(x):
    assert apply(GELU, x) < 0.0


def test_gelu_uses_erf_not_tanh():
    x = 1.5
    exact = x * 0.5 * (1 + math.erf(x / math.sqrt(2)))
    tanh_approx = 0.5 * x * (1 + math.tanh(math.sqrt(2 / math.pi) * (x + 0.044715 * x ** 3)))
    assert apply(GELU, x) == pytest.approx(exact, abs=1e-15)
    assert abs(apply(GELU, x) - tanh_approx) > 1e-6
