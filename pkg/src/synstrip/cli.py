"""Command line entry point.

    synstrip run     --config exp.toml [--seed N] [--out DIR] [--no-strip] [--threshold X]
    synstrip grid    --config base.toml --widths 256,512,1024 --depths 2,4 [--seeds 0,1,2] [--jobs N]
    synstrip inspect CHECKPOINT --config exp.toml [--threshold X] [--out DIR]
    synstrip config  (print the default configuration)
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .capacity import active_parameters
from .detection import detect
from .errors import SynstripError
from .harness import ExperimentConfig, dump_config, load_checkpoint, load_config, run_experiment, run_grid
from .harness.grid import MODES, median_table
from .harness.loop import ExperimentDiverged, prepare_splits, summarize


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _mode_list(text):
    modes = [v.strip() for v in text.split(",") if v.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown mode(s) {bad}; expected {MODES}")
    return modes


def _common(p):
    p.add_argument("--config", type=Path, help="experiment TOML file (defaults when omitted)")
    p.add_argument("--seed", type=int, help="override the run seed")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--no-strip", action="store_true", help="disable stripping (baseline run)")
    p.add_argument("--threshold", type=float, help="dead-neuron detection threshold on summed activation")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synstrip", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train a single configuration")
    _common(p)

    p = sub.add_parser("grid", help="width x depth sweep, baseline vs stripping")
    _common(p)
    p.add_argument("--widths", type=_int_list, required=True)
    p.add_argument("--depths", type=_int_list, required=True)
    p.add_argument("--modes", type=_mode_list, default=list(MODES))
    p.add_argument("--seeds", type=_int_list)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("inspect", help="capacity report and dead set of a checkpoint")
    p.add_argument("checkpoint", type=Path)
    _common(p)

    sub.add_parser("config", help="print the default configuration as TOML")
    return parser


def _resolve(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.output.dir = str(args.out)
    if args.no_strip:
        cfg.stripping.enabled = False
    if args.threshold is not None:
        cfg.detection.threshold = args.threshold
    return cfg.validate()


def cmd_run(args) -> int:
    cfg = _resolve(args)
    try:
        _, metrics = run_experiment(cfg)
    except ExperimentDiverged as exc:
        print(f"diverged: {exc}; last good checkpoint at {exc.checkpoint}", file=sys.stderr)
        return 3
    s = summarize(metrics)
    print(f"peak val acc {100 * s['peak_val_acc']:.2f}%  dead {s['dead']}  "
          f"active {s['active_pct']:.2f}%  pruned {s['pruned_total']}  -> {cfg.output.dir}")
    return 0


def cmd_grid(args) -> int:
    cfg = _resolve(args)
    rows = run_grid(cfg, args.widths, args.depths, args.modes, args.seeds, cfg.output.dir, args.jobs)
    print(f"{'L':>2} {'N':>5} {'mode':<9} {'Acc':>6} {'#D':>6} {'%A':>6} runs")
    for (depth, width, mode), v in sorted(median_table(rows).items()):
        print(f"{depth:>2} {width:>5} {mode:<9} {100 * v['acc']:6.2f} {v['dead']:6.0f} {v['active_pct']:6.2f} {v['runs']}")
    failed = [r for r in rows if r.status != "ok"]
    for r in failed:
        print(f"cell L={r.depth} N={r.width} {r.mode} seed={r.seed}: {r.status}", file=sys.stderr)
    return 1 if failed else 0


def cmd_inspect(args) -> int:
    cfg = _resolve(args)
    net = load_checkpoint(args.checkpoint)
    splits = prepare_splits(cfg)
    ds = splits.val if cfg.detection.source == "validation" else splits.train
    if ds.dim != net.layers[0].fan_in:
        print(f"dataset has {ds.dim} features but the checkpoint expects {net.layers[0].fan_in}", file=sys.stderr)
        return 2
    dead = detect(net, ds.features, cfg.detection.threshold, cfg.detection.source, cfg.eval_batch_size)
    cap = active_parameters(net, dead)
    report = {
        "checkpoint": str(args.checkpoint),
        "detection_source": cfg.detection.source,
        "threshold": cfg.detection.threshold,
        "total_params": cap.total_params,
        "pruned_params": cap.pruned_params,
        "dead_attached_params": cap.dead_attached_params,
        "active_params": cap.active_params,
        "active_pct": cap.active_pct,
        "dead_neurons": cap.dead_neurons,
        "dead": {str(i): [int(j) for j in ix] for i, ix in enumerate(dead.indices)},
    }
    for key in ("total_params", "pruned_params", "dead_attached_params", "active_params", "dead_neurons"):
        print(f"{key:<22} {report[key]}")
    print(f"{'active_pct':<22} {cap.active_pct:.2f}")
    for i, ix in enumerate(dead.indices):
        print(f"dead in hidden layer {i}: {len(ix)}" + (f"  {list(map(int, ix))}" if len(ix) else ""))
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "inspect.json").write_text(json.dumps(report, indent=2) + "\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "config":
        sys.stdout.write(dump_config(ExperimentConfig()))
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    handler = {"run": cmd_run, "grid": cmd_grid, "inspect": cmd_inspect}[args.command]
    try:
        return handler(args)
    except SynstripError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
