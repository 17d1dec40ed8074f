"""Dispatch a config to its experiment and write the outputs."""

from __future__ import annotations

from pathlib import Path

from hrp.experiments.config import ExperimentConfig, load_config
from hrp.experiments.harness import ExperimentReport, write_report
from hrp.experiments.suite import EXPERIMENT_FUNCS


def run_config(cfg: ExperimentConfig) -> ExperimentReport:
    return EXPERIMENT_FUNCS[cfg.name](cfg)


def run(config_path) -> tuple[ExperimentReport, Path, Path]:
    """Run the experiment named in ``config_path``; returns (report, csv, json)."""
    cfg = load_config(config_path)
    report = run_config(cfg)
    csv_path, json_path = write_report(report, cfg.output)
    return report, csv_path, json_path
