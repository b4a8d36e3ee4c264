"""Width x depth x mode (x seed) sweeps with a per-cell summary table."""

from __future__ import annotations

import copy
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .loop import prepare_splits, run_experiment, summarize

log = logging.getLogger(__name__)

MODES = ("baseline", "stripping")
SUMMARY_HEADER = ["L", "N", "mode", "seed", "acc", "dead", "active_pct", "pruned_total",
                  "final_val_acc", "status"]


@dataclass
class GridRow:
    depth: int
    width: int
    mode: str
    seed: int
    acc: float = float("nan")
    dead: int = -1
    active_pct: float = float("nan")
    pruned_total: int = 0
    final_val_acc: float = float("nan")
    status: str = "ok"
    dead_history: tuple = ()

    def row(self) -> list[str]:
        return [str(self.depth), str(self.width), self.mode, str(self.seed), repr(self.acc),
                str(self.dead), repr(self.active_pct), str(self.pruned_total),
                repr(self.final_val_acc), self.status]


def cell_config(base: ExperimentConfig, depth: int, width: int, mode: str, seed: int) -> ExperimentConfig:
    cfg = copy.deepcopy(base)
    cfg.model.hidden = [width] * depth
    cfg.stripping.enabled = mode == "stripping"
    cfg.seed = seed
    return cfg


def cell_dir(out_dir, depth, width, mode, seed) -> Path:
    return Path(out_dir) / f"L{depth}_N{width}_{mode}_s{seed}"


def _run_cell(args) -> GridRow:
    base, depth, width, mode, seed, out_dir, splits = args
    row = GridRow(depth, width, mode, seed)
    try:
        cfg = cell_config(base, depth, width, mode, seed)
        _, metrics = run_experiment(cfg, out_dir=cell_dir(out_dir, depth, width, mode, seed), splits=splits)
        s = summarize(metrics)
        row.acc, row.dead, row.active_pct = s["peak_val_acc"], s["dead"], s["active_pct"]
        row.pruned_total, row.final_val_acc = s["pruned_total"], s["final_val_acc"]
        row.dead_history = tuple(m.dead_count for m in metrics)
    except Exception as exc:  # a failed cell must not stop the sweep
        log.exception("grid cell L=%d N=%d %s seed=%d failed", depth, width, mode, seed)
        row.status = f"failed: {type(exc).__name__}: {exc}".replace("\n", " ")
    return row


def run_grid(base: ExperimentConfig, widths, depths, modes=MODES, seeds=None, out_dir=None,
             jobs: int = 1) -> list[GridRow]:
    """Run every (depth, width, mode, seed) cell and write ``grid_summary.csv``.

    The dataset is loaded and split once and shared by all cells. With
    ``jobs > 1`` cells run in separate processes; each cell is still
    sequential and deterministic.
    """
    base.validate()
    for m in modes:
        if m not in MODES:
            raise ValueError(f"unknown mode {m!r}; expected one of {MODES}")
    seeds = [base.seed] if seeds is None else list(seeds)
    out = Path(out_dir if out_dir is not None else base.output.dir)
    out.mkdir(parents=True, exist_ok=True)
    splits = prepare_splits(base)

    cells = [(base, d, w, m, s, out, splits) for d in depths for w in widths for m in modes for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell, cells))
    else:
        rows = [_run_cell(c) for c in cells]

    write_summary(rows, out / "grid_summary.csv")
    if base.output.figures:
        from .. import plotting
        plotting.plot_grid_dead_counts(rows, out / "grid_dead_neurons.png")
        first = {}
        for r in rows:
            if r.status == "ok" and r.seed == seeds[0]:
                first[(r.depth, r.width, r.mode)] = r.dead_history
        plotting.plot_grid_dead_over_time(first, out / "grid_dead_over_time.png")
    return rows


def write_summary(rows, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for r in rows:
            w.writerow(r.row())
    return path


def median_table(rows) -> dict:
    """Median acc / dead / active_pct per (depth, width, mode) over seeds."""
    groups: dict = {}
    for r in rows:
        if r.status == "ok":
            groups.setdefault((r.depth, r.width, r.mode), []).append(r)
    return {
        key: {
            "acc": float(np.median([r.acc for r in rs])),
            "dead": float(np.median([r.dead for r in rs])),
            "active_pct": float(np.median([r.active_pct for r in rs])),
            "runs": len(rs),
        }
        for key, rs in groups.items()
    }
