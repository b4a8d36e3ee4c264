import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_capacity
from synstrip import network as nn
from synstrip.activations import RELU
from synstrip.capacity import active_parameters, zero_inactive
from synstrip.detection import DeadSet, detect


def test_no_dead_no_pruning_is_full():
    net = nn.init([5, 4, 3, 2], RELU, seed=0)
    rep = active_parameters(net, DeadSet.empty(net))
    assert rep.active_pct == 100.0
    assert rep.total_params == 5 * 4 + 4 * 3 + 3 * 2 + 4 + 3


def test_one_dead_neuron_in_first_hidden_layer():
    d, h1, h2, c = 6, 5, 4, 3
    net = nn.init([d, h1, h2, c], RELU, seed=0)
    dead = DeadSet.from_lists(net, [[2], []])
    rep = active_parameters(net, dead)
    assert rep.dead_attached_params == d + 1 + h2
    total, pruned, attached, active = brute_force_capacity(net, [[2], []])
    assert (rep.total_params, rep.pruned_params, rep.dead_attached_params, rep.active_params) == \
        (total, pruned, attached, active)


def test_weight_between_two_dead_neurons_counted_once():
    net = nn.init([3, 2, 2, 2], RELU, seed=0)
    rep = active_parameters(net, DeadSet.from_lists(net, [[0], [1]]))
    # layer0 col0: 3, bias 1; layer1 row0: 2, col1: 2 minus the shared (0,1); bias 1; layer2 row1: 2
    assert rep.dead_attached_params == 3 + 1 + 3 + 1 + 2


def test_pruned_dead_fan_in_counted_as_pruned():
    net = nn.init([4, 3, 2], RELU, seed=0)
    net.layers[0].mask[:2, 1] = 0.0
    net.enforce_masks()
    rep = active_parameters(net, DeadSet.from_lists(net, [[1]]))
    assert rep.pruned_params == 2
    assert rep.dead_attached_params == 2 + 1 + 2
    assert rep.active_params + rep.pruned_params + rep.dead_attached_params == rep.total_params


def random_case(seed):
    rng = np.random.default_rng(seed)
    depth = int(rng.integers(1, 4))
    widths = [int(rng.integers(1, 5)) for _ in range(depth + 2)]
    while sum(a * b for a, b in zip(widths, widths[1:])) + sum(widths[1:-1]) > 100:
        widths = [max(1, w - 1) for w in widths]
    net = nn.init(widths, RELU, seed=seed)
    for layer in net.layers:
        layer.mask[rng.random(layer.mask.shape) < 0.2] = 0.0
    net.enforce_masks()
    dead = [sorted(rng.choice(w, int(rng.integers(0, w + 1)), replace=False).tolist()) for w in widths[1:-1]]
    return net, dead


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_matches_brute_force(seed):
    net, dead = random_case(seed)
    rep = active_parameters(net, DeadSet.from_lists(net, dead))
    total, pruned, attached, active = brute_force_capacity(net, dead)
    assert (rep.total_params, rep.pruned_params, rep.dead_attached_params, rep.active_params) == \
        (total, pruned, attached, active)
    assert 0.0 <= rep.active_pct <= 100.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(0, 100))
def test_monotone_in_dead_set(seed, pick):
    net, dead = random_case(seed)
    base = active_parameters(net, DeadSet.from_lists(net, dead)).active_params
    layer = pick % len(dead)
    width = net.layers[layer].fan_out
    more = [list(d) for d in dead]
    more[layer] = sorted(set(more[layer]) | {pick % width})
    assert active_parameters(net, DeadSet.from_lists(net, more)).active_params <= base


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_zeroing_inactive_preserves_logits_on_detection_set(seed):
    rng = np.random.default_rng(seed)
    net = nn.init([6, 8, 7, 3], RELU, seed=seed)
    for layer in net.layers[:-1]:
        layer.bias[:] = rng.normal(scale=1.5, size=layer.fan_out)
    x = rng.uniform(-1, 1, size=(25, 6))
    dead = detect(net, x)
    stripped = zero_inactive(net, dead)
    assert nn.forward(stripped, x).logits.tobytes() == nn.forward(net, x).logits.tobytes()
