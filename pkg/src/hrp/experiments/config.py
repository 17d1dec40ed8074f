"""Experiment configuration: a flat key-value YAML mapping.

Required keys: ``name``, ``seeds``, ``output``.  Everything else has a
default listed in :class:`ExperimentConfig`.  ``seeds`` is either a list of
integers or a mapping ``{start: a, count: n}``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import yaml

from hrp.core import Flavor, HolderParams
from hrp.sampler import BridgeSubdivision, EbmConfig, TruncatedSeries

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "EXPERIMENTS"]

EXPERIMENTS = (
    "wong_zakai",
    "adapted",
    "support",
    "lemma21",
    "martingale",
    "lipschitz",
    "appendix_lemma",
)

REQUIRED = ("name", "seeds", "output")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field {field_name!r}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    seeds: tuple[int, ...]
    output: str
    p: float = 2.5
    gamma: float = 0.05
    K: int = 12
    d: int = 2
    sizes: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8, 9, 10)
    method: str = "bridge"
    m: int = 4
    terms: int = 32
    flavor: str = "stratonovich"
    workers: int = 1
    # Monte-Carlo sizes
    samples: int = 10_000
    cells: int = 40
    # support / lipschitz inputs
    h_file: str | None = None
    h_level: int = 3
    field: str = "linear-scalar"
    y0: float = 1.0
    eps: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    alphas: tuple[float, ...] = (0.3, 0.5, 0.7, 0.8)
    # pre-registered thresholds
    monotone_fraction: float = 0.9
    slope_band: float = 0.2
    stderr_k_moment: float = 3.0
    stderr_k_martingale: float = 4.0
    cell_fraction: float = 0.95
    stability_max: float = 10.0
    support_delta: float = 0.5
    delta_grid: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 8.0)
    tail_flatness: float = 1e-3

    @property
    def params(self) -> HolderParams:
        return HolderParams(self.p, self.gamma, self.K)

    def ebm(self, d: int | None = None, K: int | None = None) -> EbmConfig:
        method = BridgeSubdivision(self.m) if self.method == "bridge" else TruncatedSeries(self.terms)
        return EbmConfig(self.K if K is None else K, self.d if d is None else d,
                         method, Flavor(self.flavor))

    def thresholds(self) -> dict:
        keys = ("monotone_fraction", "slope_band", "stderr_k_moment", "stderr_k_martingale",
                "cell_fraction", "stability_max", "support_delta", "tail_flatness")
        return {k: getattr(self, k) for k in keys}

    def echo(self) -> dict:
        return {f.name: _plain(getattr(self, f.name)) for f in dataclasses.fields(self)}


def _plain(v):
    return list(v) if isinstance(v, tuple) else v


_TUPLES = {"seeds": int, "sizes": int, "eps": float, "alphas": float, "delta_grid": float}


def _coerce(key: str, value, target):
    try:
        if key in _TUPLES:
            if not isinstance(value, (list, tuple)):
                raise TypeError("expected a list")
            return tuple(_TUPLES[key](v) for v in value)
        if target in ("int",):
            if isinstance(value, bool) or int(value) != value:
                raise TypeError("expected an integer")
            return int(value)
        if target in ("float",):
            return float(value)
        if target in ("str",):
            return str(value)
        if target == "str | None":
            return None if value is None else str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None
    return value


def config_from_mapping(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a key-value mapping")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(key, "missing required field")
    known = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigError(key, "unknown field")
        if key == "seeds" and isinstance(value, dict):
            try:
                value = list(range(int(value["start"]), int(value["start"]) + int(value["count"])))
            except (KeyError, TypeError, ValueError):
                raise ConfigError("seeds", "range form needs integer 'start' and 'count'") from None
        values[key] = _coerce(key, value, known[key].type)
    cfg = ExperimentConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    if cfg.name not in EXPERIMENTS:
        raise ConfigError("name", f"unknown experiment {cfg.name!r}; known: {', '.join(EXPERIMENTS)}")
    if not cfg.seeds:
        raise ConfigError("seeds", "must be nonempty")
    if cfg.method not in ("bridge", "series"):
        raise ConfigError("method", "must be 'bridge' or 'series'")
    try:
        cfg.params
    except ValueError as exc:
        raise ConfigError("p/gamma", str(exc)) from None
    if any(not 1 <= n <= cfg.K for n in cfg.sizes):
        raise ConfigError("sizes", f"every size must lie in [1, K={cfg.K}]")
    if cfg.workers < 1:
        raise ConfigError("workers", "must be >= 1")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"cannot parse {path}: {exc}") from None
    return config_from_mapping(raw)
