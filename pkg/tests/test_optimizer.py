import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ScalarAdam
from synstrip import network as nn
from synstrip.activations import RELU
from synstrip.errors import ConfigError, NumericError
from synstrip.network import Gradients
from synstrip.optimizer import AdamState, ScheduleSpec, adam_step, lr_at


def one_param_net(theta):
    net = nn.init([1, 1], RELU, seed=0)
    net.layers[0].weights[0, 0] = theta
    return net


def grads_for(net, gw, gb=0.0):
    return Gradients([np.array([[gw]])], [np.array([gb])])


def test_single_step_by_hand():
    net = one_param_net(1.0)
    state = AdamState.for_network(net)
    adam_step(net, grads_for(net, 1.0), state, lr=0.1)
    # m_hat = v_hat = 1 after bias correction.
    assert net.layers[0].weights[0, 0] == pytest.approx(1 - 0.1 / (1 + 1e-8), abs=1e-15)
    assert net.layers[0].weights[0, 0] == pytest.approx(0.9, abs=1e-8)


def test_zero_gradient_is_identity():
    net = nn.init([4, 5, 3], RELU, seed=1)
    before = net.copy()
    state = AdamState.for_network(net)
    zero = Gradients([np.zeros_like(l.weights) for l in net.layers], [np.zeros_like(l.bias) for l in net.layers])
    for _ in range(5):
        adam_step(net, zero, state, lr=0.1)
    for a, b in zip(net.layers, before.layers):
        assert a.weights.tobytes() == b.weights.tobytes()
        assert a.bias.tobytes() == b.bias.tobytes()


def test_masked_entry_stays_zero_under_injected_gradient():
    net = nn.init([3, 2], RELU, seed=0)
    net.layers[0].mask[1, 0] = 0.0
    net.enforce_masks()
    state = AdamState.for_network(net)
    g = Gradients([np.full((3, 2), 5.0)], [np.zeros(2)])
    adam_step(net, g, state, lr=0.5, weight_decay=0.1)
    assert net.layers[0].weights[1, 0] == 0.0
    assert state.m_w[0][1, 0] == 0.0 and state.v_w[0][1, 0] == 0.0
    assert net.layers[0].weights[0, 0] != 0.0


def test_non_finite_gradient_raises():
    net = one_param_net(1.0)
    with pytest.raises(NumericError):
        adam_step(net, grads_for(net, float("nan")), AdamState.for_network(net), lr=0.1)


@pytest.mark.parametrize("wd", [0.0, 5e-5])
def test_matches_scalar_adam_for_100_steps(wd):
    rng = np.random.default_rng(0)
    net = one_param_net(0.7)
    state = AdamState.for_network(net)
    ref = ScalarAdam(0.7)
    for _ in range(100):
        g = float(rng.normal())
        adam_step(net, grads_for(net, g), state, lr=1e-2, weight_decay=wd)
        ref.step(g, 1e-2, wd)
        assert abs(net.layers[0].weights[0, 0] - ref.theta) < 1e-12


def test_variance_nonnegative():
    net = nn.init([4, 4, 2], RELU, seed=0)
    state = AdamState.for_network(net)
    rng = np.random.default_rng(0)
    for _ in range(10):
        x, y = rng.normal(size=(5, 4)), rng.integers(0, 2, 5)
        adam_step(net, nn.backward(net, nn.forward(net, x), y), state, lr=1e-2)
    assert all(np.all(v >= 0) for v in state.v_w + state.v_b)


WARMUP_COSINE = ScheduleSpec("warmup_cosine", lr_max=1e-3, lr_min=1e-5, warmup_epochs=5, total_epochs=200)


def test_warmup_cosine_endpoints():
    assert lr_at(WARMUP_COSINE, 4) == 1e-3
    assert lr_at(WARMUP_COSINE, 199) == 1e-5
    assert lr_at(WARMUP_COSINE, 0) == pytest.approx(2e-4)
    assert lr_at(WARMUP_COSINE, 5) == 1e-3


def test_cosine_midpoint():
    s = ScheduleSpec("cosine", lr_max=1e-3, lr_min=1e-5, total_epochs=11)
    assert lr_at(s, 5) == pytest.approx((1e-3 + 1e-5) / 2, abs=1e-18)
    assert lr_at(s, 0) == 1e-3
    assert lr_at(s, 10) == 1e-5


def test_constant():
    s = ScheduleSpec("constant", lr_max=1e-3, total_epochs=50)
    assert {lr_at(s, e) for e in range(50)} == {1e-3}


def test_schedule_errors():
    with pytest.raises(ConfigError):
        lr_at(WARMUP_COSINE, 200)
    with pytest.raises(ConfigError):
        lr_at(WARMUP_COSINE, -1)
    with pytest.raises(ConfigError):
        ScheduleSpec("warmup_cosine", warmup_epochs=10, total_epochs=10)
    with pytest.raises(ConfigError):
        ScheduleSpec("cosine", lr_max=1e-5, lr_min=1e-3)


@given(st.integers(0, 20), st.integers(1, 100), st.sampled_from(["cosine", "warmup_cosine"]))
def test_non_increasing_after_warmup(warmup, extra, kind):
    if kind == "cosine":
        warmup = 0
    s = ScheduleSpec(kind, lr_max=1e-3, lr_min=1e-5, warmup_epochs=warmup, total_epochs=warmup + extra)
    rates = [lr_at(s, e) for e in range(warmup, s.total_epochs)]
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    assert all(1e-5 <= r <= 1e-3 for r in rates)
