"""Experiment orchestration: config, training loop, grids, checkpoints, histograms."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import ExperimentConfig, dump_config, load_config, parse_config
from .grid import GridRow, median_table, run_grid
from .histogram import HistogramRecord, dump_neuron_histogram
from .loop import EpochMetrics, ExperimentDiverged, RunResult, run_experiment, summarize

__all__ = [
    "EpochMetrics", "ExperimentConfig", "ExperimentDiverged", "GridRow", "HistogramRecord",
    "RunResult", "dump_config", "dump_neuron_histogram", "load_checkpoint", "load_config",
    "median_table", "parse_config", "run_experiment", "run_grid", "save_checkpoint", "summarize",
]
