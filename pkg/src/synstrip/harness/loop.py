"""The train -> detect -> strip loop for a single experiment."""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .. import network as nn
from ..capacity import active_parameters
from ..data import Dataset, holdout, load_cifar, load_idx, split, synthetic_gaussian
from ..detection import detect, scan, find_dead
from ..errors import ConfigError, NumericError
from ..optimizer import AdamState, adam_step, lr_at
from ..stripping import pruned_total, strip
from .checkpoint import save_checkpoint
from .config import ExperimentConfig, dump_config
from .histogram import HistogramWriter

log = logging.getLogger(__name__)

METRICS_HEADER = ["epoch", "lr", "train_loss", "val_loss", "val_acc", "test_acc", "dead_count",
                  "pruned_epoch", "pruned_total", "active_pct", "wall_ms"]


@dataclass
class EpochMetrics:
    epoch: int
    lr: float
    train_loss: float
    val_loss: float
    val_acc: float
    test_acc: float
    dead_count: int
    pruned_this_epoch: int
    pruned_cumulative: int
    active_param_pct: float
    wall_time_ms: float = 0.0

    @property
    def active_pct(self) -> float:
        return self.active_param_pct

    def row(self) -> list[str]:
        return [str(self.epoch), repr(self.lr), repr(self.train_loss), repr(self.val_loss),
                repr(self.val_acc), repr(self.test_acc), str(self.dead_count),
                str(self.pruned_this_epoch), str(self.pruned_cumulative),
                repr(self.active_param_pct), repr(self.wall_time_ms)]


class RunResult(NamedTuple):
    net: nn.DenseNetwork
    metrics: list[EpochMetrics]


class ExperimentDiverged(NumericError):
    def __init__(self, message, epoch, checkpoint):
        super().__init__(message)
        self.epoch = epoch
        self.checkpoint = checkpoint


@dataclass
class Splits:
    train: Dataset
    val: Dataset
    test: Dataset
    holdout: Dataset | None = None


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    d = cfg.data
    if d.kind == "synthetic":
        s = d.synthetic
        return synthetic_gaussian(s.classes, s.samples_per_class, s.dim, s.seed, s.sigma)
    if d.kind in ("cifar10", "cifar100"):
        if not d.path:
            raise ConfigError(f"data.path is required for {d.kind}")
        return load_cifar(Path(d.path).expanduser(), "c10" if d.kind == "cifar10" else "c100")
    if not (d.images and d.labels):
        raise ConfigError("data.images and data.labels are required for idx data")
    return load_idx(Path(d.images).expanduser(), Path(d.labels).expanduser())


def prepare_splits(cfg: ExperimentConfig, ds: Dataset | None = None) -> Splits:
    ds = load_dataset(cfg) if ds is None else ds
    hold = holdout(ds)
    if cfg.data.limit:
        n = len(ds) if ds.holdout_start is None else ds.holdout_start
        keep = np.sort(np.random.default_rng(cfg.data.split.seed).permutation(n)[:cfg.data.limit])
        ds = ds.subset(keep)
    train, val, test = split(ds, cfg.data.split.spec())
    return Splits(train, val, test, hold)


def evaluate(net: nn.DenseNetwork, ds: Dataset, batch_size: int) -> tuple[float, float]:
    """Mean NLL and accuracy over a dataset, in a fixed batch order."""
    total_nll, correct = 0.0, 0.0
    for start in range(0, len(ds), batch_size):
        sl = slice(start, start + batch_size)
        nll, acc = nn.loss_and_accuracy(net, ds.features[sl], ds.labels[sl])
        rows = ds.features[sl].shape[0]
        total_nll += nll * rows
        correct += acc * rows
    return total_nll / len(ds), correct / len(ds)


def train_epoch(net, state, ds: Dataset, lr: float, cfg: ExperimentConfig, rng) -> float:
    order = rng.permutation(len(ds))
    total = 0.0
    for start in range(0, len(ds), cfg.batch_size):
        idx = order[start:start + cfg.batch_size]
        x, y = ds.features[idx], ds.labels[idx]
        trace = nn.forward(net, x)
        nll, _ = nn.loss_and_accuracy_from_logits(trace.logits, y)
        if not np.isfinite(nll):
            raise NumericError(f"non-finite training loss {nll}")
        grads = nn.backward(net, trace, y)
        adam_step(net, grads, state, lr, cfg.optimizer.weight_decay)
        total += nll * len(idx)
    return total / len(ds)


def detection_pass(net, splits: Splits, cfg: ExperimentConfig):
    """Dead set plus validation loss/accuracy; one pass when detecting on validation."""
    bs = cfg.eval_batch_size
    if cfg.detection.source == "training":
        dead = detect(net, splits.train.features, cfg.detection.threshold, "training", bs)
        val_loss, val_acc = evaluate(net, splits.val, bs)
        return dead, val_loss, val_acc

    stats = [0.0, 0.0]

    def tally(sl, trace):
        nll, acc = nn.loss_and_accuracy_from_logits(trace.logits, splits.val.labels[sl])
        rows = trace.inputs.shape[0]
        stats[0] += nll * rows
        stats[1] += acc * rows

    ledger = scan(net, splits.val.features, bs, on_batch=tally)
    dead = find_dead(ledger, cfg.detection.threshold, "validation")
    n = len(splits.val)
    return dead, stats[0] / n, stats[1] / n


def _open_metrics(path: Path):
    fh = open(path, "w", newline="")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    return fh, writer


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None, out_dir=None,
                   splits: Splits | None = None) -> RunResult:
    """Train one network, detecting and (optionally) stripping dead neurons each epoch.

    Writes ``metrics.csv``, ``checkpoint.syns``, ``summary.json``, the
    resolved ``config.toml``, per-neuron histogram CSVs and figures into the
    output directory. Fully deterministic given the config.
    """
    cfg.validate()
    out = Path(out_dir if out_dir is not None else cfg.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.toml").write_text(dump_config(cfg))

    splits = splits or prepare_splits(cfg, dataset)
    widths = [splits.train.dim] + list(cfg.model.hidden) + [splits.train.class_count]
    net = nn.init(widths, cfg.model.activation_kind(), cfg.seed, cfg.model.init)
    o = cfg.optimizer
    state = AdamState.for_network(net, o.beta1, o.beta2, o.epsilon)
    schedule = cfg.schedule_spec()
    policy = cfg.stripping.policy() if cfg.stripping.enabled else None
    rng = np.random.default_rng(cfg.seed)

    hist = HistogramWriter(out, cfg.output.track, cfg.output.histogram_bins)
    hist.start()
    metrics: list[EpochMetrics] = []
    fh, writer = _open_metrics(out / "metrics.csv")
    try:
        for epoch in range(cfg.epochs):
            t0 = time.perf_counter()
            lr = lr_at(schedule, epoch)
            last_good = net.copy()
            try:
                train_loss = train_epoch(net, state, splits.train, lr, cfg, rng)
            except NumericError as exc:
                ckpt = save_checkpoint(last_good, out / "checkpoint.syns")
                writer.writerow([str(epoch), repr(lr)] + ["nan"] * (len(METRICS_HEADER) - 2))
                fh.flush()
                raise ExperimentDiverged(f"epoch {epoch}: {exc}", epoch, ckpt) from exc

            dead, val_loss, val_acc = detection_pass(net, splits, cfg)
            pruned_epoch = 0
            if policy is not None and policy.due(epoch):
                pruned_epoch = strip(net, dead, policy, state, epoch).pruned
            _, test_acc = evaluate(net, splits.test, cfg.eval_batch_size)
            capacity = active_parameters(net, dead)
            hist.record(net, epoch)

            wall = (time.perf_counter() - t0) * 1000.0 if cfg.output.record_wall_time else 0.0
            m = EpochMetrics(epoch, lr, train_loss, val_loss, val_acc, test_acc, dead.count,
                             pruned_epoch, pruned_total(net), capacity.active_pct, wall)
            metrics.append(m)
            writer.writerow(m.row())
            fh.flush()
            log.info("epoch %d lr=%.3g loss=%.4f val_acc=%.4f dead=%d pruned=%d active=%.2f%%",
                     epoch, lr, train_loss, val_acc, m.dead_count, m.pruned_this_epoch, m.active_pct)
    finally:
        fh.close()

    save_checkpoint(net, out / "checkpoint.syns")
    summary = summarize(metrics)
    if splits.holdout is not None:
        summary["holdout_loss"], summary["holdout_acc"] = evaluate(net, splits.holdout, cfg.eval_batch_size)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    if cfg.output.figures:
        from .. import plotting
        plotting.plot_training_curves(metrics, out / "curves.png")
        for (layer, neuron), records in hist.records.items():
            plotting.plot_histogram_evolution(records, out / f"hist_L{layer}_N{neuron}.png",
                                              title=f"layer {layer}, neuron {neuron}")
    return RunResult(net, metrics)


def summarize(metrics: list[EpochMetrics]) -> dict:
    """Run summary: peak validation accuracy, final dead count and capacity."""
    if not metrics:
        return {}
    best = max(range(len(metrics)), key=lambda k: (metrics[k].val_acc, -k))
    last = metrics[-1]
    return {
        "epochs": len(metrics),
        "peak_val_acc": metrics[best].val_acc,
        "peak_epoch": metrics[best].epoch,
        "final_val_acc": last.val_acc,
        "final_test_acc": last.test_acc,
        "dead": last.dead_count,
        "active_pct": last.active_pct,
        "pruned_total": last.pruned_cumulative,
    }
