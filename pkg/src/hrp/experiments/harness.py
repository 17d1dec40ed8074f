"""Report container, seed fan-out and file output."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

__all__ = ["ExperimentReport", "map_seeds", "write_report", "monotone_fraction", "loglog_slope"]


@dataclass
class ExperimentReport:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)
    passed: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "summary": self.summary,
            "thresholds": self.thresholds,
            "pass": self.passed,
            "all_pass": self.ok,
            "config": self.config,
        }
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else repr(x)
    return x


def map_seeds(fn: Callable, seeds: Sequence[int], workers: int = 1) -> list:
    """Apply ``fn`` to every seed; results keep seed order for any worker count."""
    if workers <= 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds))


def write_report(report: ExperimentReport, output) -> tuple[Path, Path]:
    base = Path(output)
    try:
        base.parent.mkdir(parents=True, exist_ok=True)
        csv_path = base.with_suffix(".csv")
        json_path = base.with_suffix(".json")
        csv_path.write_text(report.to_csv())
        json_path.write_text(report.to_json())
    except OSError as exc:
        raise OSError(f"cannot write experiment output at {base}: {exc}") from exc
    return csv_path, json_path


def monotone_fraction(curve: Sequence[float]) -> float:
    """Share of adjacent pairs along which the curve strictly decreases."""
    c = np.asarray(curve, dtype=float)
    if c.size < 2:
        return 1.0
    return float(np.mean(np.diff(c) < 0))


def loglog_slope(x, y, y_err=None, base: float = np.e) -> tuple[float, float, float]:
    """Weighted least-squares slope of log y against log x.

    Returns (slope, intercept, slope standard error).  Weights come from the
    delta method, var(log y) ~ (y_err / y)^2; without errors the fit is
    ordinary least squares.
    """
    lx = np.log(np.asarray(x, dtype=float)) / np.log(base)
    ly = np.log(np.asarray(y, dtype=float)) / np.log(base)
    if y_err is None:
        w = np.ones_like(lx)
    else:
        rel = np.asarray(y_err, dtype=float) / np.asarray(y, dtype=float) / np.log(base)
        w = 1.0 / np.maximum(rel, 1e-300) ** 2
    A = np.vstack([lx, np.ones_like(lx)]).T
    W = np.diag(w)
    cov = np.linalg.inv(A.T @ W @ A)
    slope, intercept = cov @ A.T @ W @ ly
    if y_err is None:
        resid = ly - (slope * lx + intercept)
        dof = max(len(lx) - 2, 1)
        cov = cov * float(resid @ resid) / dof
    return float(slope), float(intercept), float(np.sqrt(cov[0, 0]))
