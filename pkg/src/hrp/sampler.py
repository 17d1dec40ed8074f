"""Brownian paths on dyadic grids and their enhancement to rough paths.

Random numbers come from numpy's PCG64 seeded through ``SeedSequence(seed,
spawn_key=(stream_id,))``; one substream per sample keeps every table
reproducible independently of how samples are distributed over workers.

Two Levy-area constructions are provided:

* bridge subdivision: refine each grid interval by ``m`` levels of Brownian
  bridge midpoints and take the area of the piecewise-linear interpolant;
* truncated Fourier series of the bridge (Kloeden-Platen-Wright form), with
  the coefficient that couples the area to the increment sampled exactly.

Both keep the symmetric part of every interval tensor equal to
``0.5 * dx (x) dx`` and differ only in the antisymmetric (area) part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from hrp.core import Flavor, GridRoughPath, convert_flavor, dyadic_times, sym_antisym

__all__ = [
    "RngStream",
    "BridgeSubdivision",
    "TruncatedSeries",
    "EbmConfig",
    "sample_bm",
    "bridge_refine",
    "levy_area_bridge",
    "levy_area_series",
    "sample_ebm",
    "moment_probe",
    "MomentEstimate",
]


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class BridgeSubdivision:
    m: int = 4

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be >= 0")


@dataclass(frozen=True)
class TruncatedSeries:
    terms: int = 32

    def __post_init__(self):
        if self.terms < 1:
            raise ValueError("terms must be >= 1")


Method = Union[BridgeSubdivision, TruncatedSeries]


@dataclass(frozen=True)
class EbmConfig:
    K: int = 12
    d: int = 2
    method: Method = BridgeSubdivision()
    flavor: Flavor = Flavor.STRATONOVICH

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("K must be >= 0")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if self.flavor is Flavor.SMOOTH:
            raise ValueError("EBM flavor is stratonovich or ito")


def sample_bm(K: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Brownian motion at the nodes i/2^K, started at 0."""
    n = 2**K
    steps = rng.standard_normal((n, d)) * np.sqrt(1.0 / n)
    values = np.zeros((n + 1, d))
    np.cumsum(steps, axis=0, out=values[1:])
    return values


def bridge_refine(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Insert Brownian-bridge midpoints into every interval of a dyadic path.

    The input nodes are kept bit for bit; midpoints have mean the average of
    the endpoints and variance dt/4 per coordinate.
    """
    values = np.asarray(values, dtype=float)
    n, d = values.shape[0] - 1, values.shape[1]
    dt = 1.0 / n
    mids = 0.5 * (values[:-1] + values[1:]) + np.sqrt(dt / 4.0) * rng.standard_normal((n, d))
    out = np.empty((2 * n + 1, d))
    out[0::2] = values
    out[1::2] = mids
    return out


def _block_areas(values: np.ndarray, block: int) -> np.ndarray:
    """Chen-aggregate the piecewise-linear lift over consecutive blocks of steps."""
    d = values.shape[1]
    steps = np.diff(values, axis=0).reshape(-1, block, d)
    start = values[:-1:block]
    anchor = values[:-1].reshape(-1, block, d) - start[:, None, :]
    inner = anchor[..., :, None] * steps[..., None, :] + 0.5 * steps[..., :, None] * steps[..., None, :]
    return inner.sum(axis=1)


def _with_exact_symmetric_part(coarse_steps: np.ndarray, areas: np.ndarray) -> np.ndarray:
    sym = 0.5 * coarse_steps[:, :, None] * coarse_steps[:, None, :]
    return sym + areas


def levy_area_bridge(values: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """Stratonovich interval tensors from ``m`` levels of bridge refinement."""
    values = np.asarray(values, dtype=float)
    if m < 0:
        raise ValueError("m must be >= 0")
    fine = values
    for _ in range(m):
        fine = bridge_refine(fine, rng)
    _, anti = sym_antisym(_block_areas(fine, 2**m))
    return _with_exact_symmetric_part(np.diff(values, axis=0), anti)


def _series_areas(steps: np.ndarray, dt: float, terms: int, rng: np.random.Generator) -> np.ndarray:
    n, d = steps.shape
    r = np.arange(1, terms + 1, dtype=float)
    sd = np.sqrt(dt / (2.0 * np.pi**2)) / r
    a = rng.standard_normal((n, d, terms)) * sd
    b = rng.standard_normal((n, d, terms)) * sd
    # a_0 = -2 sum_r a_r; the tail r > terms is added as one exact Gaussian
    tail_var = dt / (2.0 * np.pi**2) * (np.pi**2 / 6.0 - np.sum(1.0 / r**2))
    tail = rng.standard_normal((n, d)) * np.sqrt(max(tail_var, 0.0))
    a0 = -2.0 * (a.sum(axis=2) + tail)
    weight = np.pi * r
    series = np.einsum("r,nir,njr->nij", weight, a, b)
    area = series - np.swapaxes(series, 1, 2)
    area += 0.5 * (a0[:, :, None] * steps[:, None, :] - steps[:, :, None] * a0[:, None, :])
    return area


def levy_area_series(increment: np.ndarray, dt: float, terms: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Stratonovich second level of one interval given its increment.

    Returns ``0.5 * dx (x) dx + A`` with A the truncated-series Levy area
    conditional on ``dx``.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    step = np.atleast_1d(np.asarray(increment, dtype=float))[None, :]
    area = _series_areas(step, dt, terms, rng)
    return _with_exact_symmetric_part(step, area)[0]


def sample_ebm(config: EbmConfig, rng: np.random.Generator) -> GridRoughPath:
    values = sample_bm(config.K, config.d, rng)
    method = config.method
    if isinstance(method, BridgeSubdivision):
        adj = levy_area_bridge(values, method.m, rng)
    elif isinstance(method, TruncatedSeries):
        steps = np.diff(values, axis=0)
        adj = _with_exact_symmetric_part(
            steps, _series_areas(steps, 2.0**-config.K, method.terms, rng)
        )
    else:
        raise TypeError(f"unknown Levy-area method {method!r}")
    X = GridRoughPath.build(values, adj, Flavor.STRATONOVICH, dyadic_times(config.K))
    if config.flavor is Flavor.ITO:
        X = convert_flavor(X, Flavor.ITO)
    return X


@dataclass(frozen=True)
class MomentEstimate:
    pair: tuple[float, float, float, float]
    mean: float
    std_err: float


def _grid_index(t: float, K: int) -> int:
    x = t * 2**K
    i = int(round(x))
    if abs(i - x) > 1e-9:
        raise ValueError(f"time {t} is not on the depth-{K} grid")
    return i


def moment_probe(p: float, pairs: Sequence[tuple[float, float, float, float]],
                 samples: int, rng: np.random.Generator,
                 config: EbmConfig | None = None, component=(0, 1)) -> list[MomentEstimate]:
    """Monte-Carlo E|Z^2_{s,t} - Z^2_{s',t'}|^2 for one off-diagonal entry.

    Each sample is a fresh EBM path drawn from ``config`` (default: depth 8,
    four bridge levels, d = 2).  Pairs with s >= t contribute Z = 0.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    config = config or EbmConfig(K=8, d=2, method=BridgeSubdivision(4))
    if config.d < 2:
        raise ValueError("an off-diagonal component needs d >= 2")
    a, b = component
    if a == b:
        raise ValueError("component must be off-diagonal")
    idx = np.array([[_grid_index(t, config.K) for t in q] for q in pairs], dtype=int)
    times = dyadic_times(config.K)

    def z(X, i, j):
        out = np.zeros(len(i))
        ok = j > i
        inc = X.level2_increments(i[ok], j[ok])[:, a, b]
        out[ok] = inc / (times[j[ok]] - times[i[ok]]) ** (2.0 / p)
        return out

    acc = np.zeros((samples, len(pairs)))
    for k in range(samples):
        X = sample_ebm(config, rng)
        acc[k] = (z(X, idx[:, 0], idx[:, 1]) - z(X, idx[:, 2], idx[:, 3])) ** 2
    mean = acc.mean(axis=0)
    err = acc.std(axis=0, ddof=1) / np.sqrt(samples)
    return [MomentEstimate(tuple(map(float, q)), float(mu), float(se))
            for q, mu, se in zip(pairs, mean, err)]
