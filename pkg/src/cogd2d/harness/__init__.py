"""Experiment harness: configuration, figure presets, sweeps, CSV, plots."""

from .config import ExperimentConfig, load_config, save_config
from .presets import PRESETS, get_preset_config, list_presets
from .runner import CSV_HEADER, ResultRow, run_experiment, write_csv

__all__ = [
    "CSV_HEADER",
    "ExperimentConfig",
    "PRESETS",
    "ResultRow",
    "get_preset_config",
    "list_presets",
    "load_config",
    "run_experiment",
    "save_config",
    "write_csv",
]
