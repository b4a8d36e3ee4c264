"""Dataset loaders (CIFAR binary batches, IDX), synthetic data and splitting."""

from __future__ import annotations

import gzip
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, FormatError, IngestionError

CIFAR10_MEAN = (0.4914, 0.4822, 0.4465)
CIFAR10_STD = (0.2023, 0.1994, 0.2010)
CIFAR100_MEAN = (0.5071, 0.4867, 0.4408)
CIFAR100_STD = (0.2675, 0.2565, 0.2761)

_CIFAR_PIXELS = 32 * 32 * 3
_CIFAR10_FILES = [f"data_batch_{i}.bin" for i in range(1, 6)] + ["test_batch.bin"]
_CIFAR100_FILES = ["train.bin", "test.bin"]

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


@dataclass
class Dataset:
    """Flattened features (samples x dim) with integer labels.

    ``holdout_start`` marks where an official test partition begins, if the
    source has one; :func:`split` then only partitions the rows before it.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    name: str = ""
    holdout_start: int | None = None

    def __post_init__(self):
        if self.features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.ndim != 1 or self.labels.shape[0] != self.features.shape[0]:
            raise DataError(f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.class_count):
            raise DataError(f"labels must lie in [0, {self.class_count})")

    def __len__(self):
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def subset(self, index, name=None) -> "Dataset":
        return Dataset(self.features[index], self.labels[index], self.class_count,
                       name or self.name)


def _read_records(path: Path, record_size: int) -> np.ndarray:
    if not path.is_file():
        raise IngestionError(f"missing dataset file {path}", path=str(path), offset=0)
    raw = np.fromfile(path, dtype=np.uint8)
    whole, rest = divmod(raw.size, record_size)
    if rest or whole == 0:
        offset = whole * record_size
        raise IngestionError(
            f"{path}: truncated record at byte offset {offset} "
            f"(file is {raw.size} bytes, records are {record_size} bytes)",
            path=str(path), offset=offset)
    return raw.reshape(whole, record_size)


def normalize_channels(pixels: np.ndarray, mean, std) -> np.ndarray:
    """Scale uint8 channel-major pixels to [0, 1] then standardize each channel."""
    x = pixels.astype(np.float64) / 255.0
    n, dim = x.shape
    per_channel = dim // len(mean)
    x = x.reshape(n, len(mean), per_channel)
    x -= np.asarray(mean, dtype=np.float64)[None, :, None]
    x /= np.asarray(std, dtype=np.float64)[None, :, None]
    return x.reshape(n, dim)


def load_cifar(path, variant: str = "c10", normalize: bool = True) -> Dataset:
    """Load CIFAR-10/100 from the official binary batch files in ``path``.

    Training records come first, followed by the official test records
    (``holdout_start`` points at the first test row). CIFAR-100 uses the fine
    label.
    """
    root = Path(path)
    if variant not in ("c10", "c100"):
        raise ConfigError(f"unknown CIFAR variant {variant!r}")
    names = _CIFAR10_FILES if variant == "c10" else _CIFAR100_FILES
    for sub in ("cifar-10-batches-bin", "cifar-100-binary"):
        if not (root / names[0]).exists() and (root / sub / names[0]).exists():
            root = root / sub
    label_bytes = 1 if variant == "c10" else 2
    chunks = [_read_records(root / name, label_bytes + _CIFAR_PIXELS) for name in names]
    records = np.concatenate(chunks)
    labels = records[:, label_bytes - 1].astype(np.int64)
    pixels = records[:, label_bytes:]
    if normalize:
        mean, std = (CIFAR10_MEAN, CIFAR10_STD) if variant == "c10" else (CIFAR100_MEAN, CIFAR100_STD)
        features = normalize_channels(pixels, mean, std)
    else:
        features = pixels.astype(np.float64) / 255.0
    n_test = chunks[-1].shape[0]
    classes = 10 if variant == "c10" else 100
    return Dataset(features, labels, classes, f"cifar{variant[1:]}", holdout_start=len(labels) - n_test)


def _open_maybe_gz(path: Path):
    if not path.is_file():
        raise IngestionError(f"missing dataset file {path}", path=str(path), offset=0)
    return gzip.open(path, "rb") if path.suffix == ".gz" else open(path, "rb")


def _read_idx(path: Path, expected_magic: set[int]) -> np.ndarray:
    with _open_maybe_gz(path) as fh:
        buf = fh.read()
    if len(buf) < 4:
        raise FormatError(f"{path}: too short for an IDX header")
    magic = int.from_bytes(buf[:4], "big")
    if magic not in expected_magic:
        raise FormatError(f"{path}: bad IDX magic 0x{magic:08x}, expected one of "
                          + ", ".join(f"0x{m:08x}" for m in sorted(expected_magic)))
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(buf) < header:
        raise IngestionError(f"{path}: truncated IDX header", path=str(path), offset=len(buf))
    dims = tuple(int.from_bytes(buf[4 + 4 * k: 8 + 4 * k], "big") for k in range(ndim))
    need = header + math.prod(dims)
    if len(buf) < need:
        raise IngestionError(f"{path}: truncated IDX payload at byte offset {len(buf)} (need {need})",
                             path=str(path), offset=len(buf))
    return np.frombuffer(buf, dtype=np.uint8, count=math.prod(dims), offset=header).reshape(dims)


def load_idx(images_path, labels_path, name: str = "idx", class_count: int | None = None) -> Dataset:
    """Load an IDX image/label pair (MNIST layout, optionally gzipped).

    Images may carry a trailing channel dimension (magic 0x00000804); every
    image is flattened and scaled to [0, 1].
    """
    images = _read_idx(Path(images_path), {IDX_IMAGES_MAGIC, 0x00000804})
    labels = _read_idx(Path(labels_path), {IDX_LABELS_MAGIC}).astype(np.int64)
    if images.shape[0] != labels.shape[0]:
        raise DataError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    features = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    classes = class_count if class_count is not None else int(labels.max()) + 1 if len(labels) else 0
    return Dataset(features, labels, classes, name)


def synthetic_gaussian(classes: int, samples_per_class: int, dim: int, seed: int = 0,
                       sigma: float = 0.5) -> Dataset:
    """Isotropic Gaussian blobs around random unit-norm class means."""
    if min(classes, samples_per_class, dim) <= 0:
        raise ConfigError("classes, samples_per_class and dim must be positive")
    rng = np.random.default_rng(seed)
    means = rng.normal(size=(classes, dim))
    means /= np.linalg.norm(means, axis=1, keepdims=True)
    labels = np.repeat(np.arange(classes, dtype=np.int64), samples_per_class)
    features = means[labels] + sigma * rng.normal(size=(labels.size, dim))
    return Dataset(features, labels, classes, f"gaussian{classes}x{dim}")


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.8
    val_frac: float = 0.1
    test_frac: float = 0.1
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_frac, self.val_frac, self.test_frac)
        if any(f <= 0 for f in fracs):
            raise ConfigError(f"split fractions must be positive, got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-12:
            raise ConfigError(f"split fractions must sum to 1, got {sum(fracs)}")


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Seeded train/validation/test partition.

    Validation and test get ``floor(frac * n)`` rows each; the remainder goes
    to training. Rows at or beyond ``ds.holdout_start`` are never used.
    """
    n = len(ds) if ds.holdout_start is None else ds.holdout_start
    perm = np.random.default_rng(spec.seed).permutation(n)
    # Round first so e.g. 0.29 * 100 (= 28.999999999999996) yields 29.
    n_val = math.floor(round(spec.val_frac * n, 9))
    n_test = math.floor(round(spec.test_frac * n, 9))
    n_train = n - n_val - n_test
    if min(n_train, n_val, n_test) <= 0:
        raise ConfigError(f"split of {n} samples leaves an empty partition ({n_train}/{n_val}/{n_test})")
    return (ds.subset(perm[:n_train], f"{ds.name}:train"),
            ds.subset(perm[n_train:n_train + n_val], f"{ds.name}:val"),
            ds.subset(perm[n_train + n_val:], f"{ds.name}:test"))


def holdout(ds: Dataset) -> Dataset | None:
    """The official test partition, if the dataset has one."""
    if ds.holdout_start is None or ds.holdout_start >= len(ds):
        return None
    return ds.subset(np.arange(ds.holdout_start, len(ds)), f"{ds.name}:holdout")


def cifar_dir_from_env(var: str = "SYNSTRIP_CIFAR10_DIR") -> str | None:
    value = os.environ.get(var)
    return value if value and Path(value).exists() else None
