"""Seeded, table-emitting reproduction experiments."""

from hrp.experiments.config import EXPERIMENTS, ConfigError, ExperimentConfig, load_config
from hrp.experiments.harness import ExperimentReport, write_report
from hrp.experiments.runner import run, run_config

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "load_config",
    "run",
    "run_config",
    "write_report",
]
