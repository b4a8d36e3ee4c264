"""Experiment configuration: TOML in, nested dataclasses out.

Every field is addressable from the file and unknown keys are rejected::

    seed = 0
    epochs = 50
    batch_size = 64

    [model]
    hidden = [256, 256]

    [stripping]
    enabled = true
    fraction = 0.1

    [data]
    kind = "cifar10"
    path = "~/data/cifar-10-batches-bin"
"""

from __future__ import annotations

import dataclasses
import sys
import typing
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..activations import ActivationKind, parse_activation
from ..data import SplitSpec
from ..errors import ConfigError
from ..optimizer import ScheduleSpec
from ..stripping import StrippingPolicy

DATA_KINDS = ("synthetic", "cifar10", "cifar100", "idx")


@dataclass
class ModelConfig:
    hidden: list[int] = field(default_factory=lambda: [256, 256])
    activation: str = "relu"
    leaky_slope: float = 0.01
    init: str = "kaiming_uniform"

    def activation_kind(self) -> ActivationKind:
        return parse_activation(self.activation, self.leaky_slope)


@dataclass
class OptimizerConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.0


@dataclass
class ScheduleConfig:
    kind: str = "constant"
    lr_min: float = 0.0
    warmup_epochs: int = 0


@dataclass
class StrippingConfig:
    enabled: bool = True
    fraction: float = 0.10
    min_remaining: int = 1
    cadence: int = 1

    def policy(self) -> StrippingPolicy:
        return StrippingPolicy(self.fraction, self.min_remaining, self.cadence)


@dataclass
class DetectionConfig:
    source: str = "validation"
    threshold: float = 0.0


@dataclass
class SplitConfig:
    train: float = 0.8
    val: float = 0.1
    test: float = 0.1
    seed: int = 0

    def spec(self) -> SplitSpec:
        return SplitSpec(self.train, self.val, self.test, self.seed)


@dataclass
class SyntheticConfig:
    classes: int = 10
    samples_per_class: int = 200
    dim: int = 32
    seed: int = 0
    sigma: float = 0.5


@dataclass
class DataConfig:
    kind: str = "synthetic"
    path: str = ""
    images: str = ""
    labels: str = ""
    limit: int = 0
    split: SplitConfig = field(default_factory=SplitConfig)
    synthetic: SyntheticConfig = field(default_factory=SyntheticConfig)


@dataclass
class OutputConfig:
    dir: str = "runs/experiment"
    figures: bool = True
    record_wall_time: bool = False
    track: list[list[int]] = field(default_factory=list)
    histogram_bins: int = 10


@dataclass
class ExperimentConfig:
    seed: int = 0
    epochs: int = 50
    batch_size: int = 64
    eval_batch_size: int = 1000
    model: ModelConfig = field(default_factory=ModelConfig)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    stripping: StrippingConfig = field(default_factory=StrippingConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    data: DataConfig = field(default_factory=DataConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def schedule_spec(self) -> ScheduleSpec:
        return ScheduleSpec(kind=self.schedule.kind, lr_max=self.optimizer.lr,
                            lr_min=self.schedule.lr_min,
                            warmup_epochs=self.schedule.warmup_epochs,
                            total_epochs=self.epochs)

    def validate(self) -> "ExperimentConfig":
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.batch_size < 1 or self.eval_batch_size < 1:
            raise ConfigError("batch sizes must be >= 1")
        if not self.model.hidden or any(w < 1 for w in self.model.hidden):
            raise ConfigError(f"model.hidden must list positive widths, got {self.model.hidden}")
        self.model.activation_kind()
        if self.optimizer.lr <= 0:
            raise ConfigError("optimizer.lr must be > 0")
        self.schedule_spec()
        if self.stripping.enabled:
            self.stripping.policy()
        if self.detection.source not in ("validation", "training"):
            raise ConfigError(f"detection.source must be 'validation' or 'training', got {self.detection.source!r}")
        if self.detection.threshold < 0:
            raise ConfigError("detection.threshold must be >= 0")
        if self.data.kind not in DATA_KINDS:
            raise ConfigError(f"data.kind must be one of {DATA_KINDS}, got {self.data.kind!r}")
        self.data.split.spec()
        for entry in self.output.track:
            if len(entry) != 2:
                raise ConfigError(f"output.track entries are [layer, neuron] pairs, got {entry}")
        if self.output.histogram_bins < 1:
            raise ConfigError("output.histogram_bins must be >= 1")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(value, hint, where):
    origin = typing.get_origin(hint)
    if dataclasses.is_dataclass(hint):
        if not isinstance(value, dict):
            raise ConfigError(f"{where}: expected a table")
        return from_dict(hint, value, where)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if origin is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        (inner,) = typing.get_args(hint)
        return [_coerce(v, inner, f"{where}[{k}]") for k, v in enumerate(value)]
    raise ConfigError(f"{where}: unsupported field type {hint}")


def from_dict(cls, raw: dict, where: str = ""):
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - names)
    if unknown:
        prefix = f"{where}." if where else ""
        raise ConfigError(f"unknown config key(s): {', '.join(prefix + k for k in unknown)}")
    kwargs = {}
    for name, value in raw.items():
        key = f"{where}.{name}" if where else name
        kwargs[name] = _coerce(value, hints[name], key)
    return cls(**kwargs)


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    return from_dict(ExperimentConfig, raw).validate()


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    return str(value)


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialize back to TOML (round-trips through :func:`parse_config`)."""
    def emit(table: dict, prefix: str, out: list):
        scalars = {k: v for k, v in table.items() if not isinstance(v, dict)}
        nested = {k: v for k, v in table.items() if isinstance(v, dict)}
        if prefix:
            out.append(f"\n[{prefix}]")
        out.extend(f"{k} = {_toml_value(v)}" for k, v in scalars.items())
        for k, v in nested.items():
            emit(v, f"{prefix}.{k}" if prefix else k, out)

    lines: list[str] = []
    emit(cfg.to_dict(), "", lines)
    return "\n".join(lines).lstrip("\n") + "\n"
