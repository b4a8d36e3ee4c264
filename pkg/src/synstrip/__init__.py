"""Dead ReLU neuron detection and regeneration by pruning for dense networks."""

from .activations import GELU, IDENTITY, RELU, ActivationKind, leaky_relu
from .capacity import CapacityReport, active_parameters
from .data import Dataset, SplitSpec, load_cifar, load_idx, split, synthetic_gaussian
from .detection import ActivationLedger, DeadSet, accumulate, detect, find_dead
from .network import DenseNetwork, Layer, backward, forward, init, loss_and_accuracy
from .optimizer import AdamState, ScheduleSpec, adam_step, lr_at
from .stripping import StrippingPolicy, StrippingReport, strip

__version__ = "0.1.0"

__all__ = [
    "GELU", "IDENTITY", "RELU", "ActivationKind", "ActivationLedger", "AdamState",
    "CapacityReport", "Dataset", "DeadSet", "DenseNetwork", "Layer", "ScheduleSpec",
    "SplitSpec", "StrippingPolicy", "StrippingReport", "accumulate", "active_parameters",
    "adam_step", "backward", "detect", "find_dead", "forward", "init", "leaky_relu",
    "load_cifar", "load_idx", "loss_and_accuracy", "lr_at", "split", "strip",
    "synthetic_gaussian",
]
