"""Piecewise-linear approximations of rough paths on a common fine grid.

Coarse objects (dyadic interpolations, the adapted approximation, translation
directions) are always re-expressed on the fine depth-K grid of the path
they approximate, so that rho and d compare like with like.  Cross integrals
against a piecewise-linear path use the trapezoidal rule, which is exact when
both integrands are linear between shared breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hrp.core import Flavor, GridRoughPath, dyadic_times, tau_shift

__all__ = [
    "DyadicPath",
    "pl_lift",
    "interpolate_dyadic",
    "coarsen",
    "adapted_approx",
    "cross_young",
    "translate",
    "girsanov_path",
]


def interpolate_dyadic(values: np.ndarray, K: int) -> np.ndarray:
    """Linear interpolation of a 2^m + 1 node path onto the 2^K + 1 grid.

    Nodes of the coarse path are reproduced exactly.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    n_coarse = values.shape[0] - 1
    m = n_coarse.bit_length() - 1
    if 2**m != n_coarse:
        raise ValueError("coarse path must have 2^m + 1 nodes")
    if m > K:
        raise ValueError(f"cannot interpolate level {m} onto coarser depth {K}")
    block = 2 ** (K - m)
    w = (np.arange(block, dtype=float) / block)[None, :, None]
    left, right = values[:-1, None, :], values[1:, None, :]
    body = (left + w * (right - left)).reshape(-1, values.shape[1])
    return np.vstack([body, values[-1:]])


@dataclass(frozen=True)
class DyadicPath:
    """Path that is linear between the nodes i/2^level."""

    level: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != 2**self.level + 1:
            raise ValueError(f"level {self.level} needs {2**self.level + 1} nodes, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("dyadic path values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def on_grid(self, K: int) -> np.ndarray:
        return interpolate_dyadic(self.values, K)

    def __neg__(self) -> "DyadicPath":
        return DyadicPath(self.level, -self.values)

    @classmethod
    def zero(cls, level: int, d: int) -> "DyadicPath":
        return cls(level, np.zeros((2**level + 1, d)))


def pl_lift(values: np.ndarray, times: np.ndarray | None = None) -> GridRoughPath:
    """Exact iterated integrals of the piecewise-linear interpolant."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] < 2:
        raise ValueError("need at least two nodes")
    steps = np.diff(values, axis=0)
    adj = 0.5 * steps[:, :, None] * steps[:, None, :]
    return GridRoughPath.build(values, adj, Flavor.SMOOTH, times)


def _depth(X: GridRoughPath) -> int:
    K = X.K
    if K is None:
        raise ValueError("path must live on a uniform dyadic grid")
    return K


def coarsen(X: GridRoughPath, n: int) -> GridRoughPath:
    """beta(n): lift of the dyadic interpolation of X's nodes at level n."""
    K = _depth(X)
    if not 0 <= n <= K:
        raise ValueError(f"need 0 <= n <= K={K}, got {n}")
    nodes = X.values[:: 2 ** (K - n)]
    return pl_lift(interpolate_dyadic(nodes, K), X.times)


def adapted_approx(X: GridRoughPath, n: int) -> GridRoughPath:
    """beta^ad(n): the level-n interpolation delayed by one coarse mesh."""
    return tau_shift(coarsen(X, n), 2.0**-n)


def cross_young(a: np.ndarray, b: np.ndarray) -> float:
    """Trapezoidal value of int (a_u - a_0) db_u for paths on a shared grid."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("cross_young needs two scalar paths on the same grid")
    return float(np.sum(0.5 * (a[:-1] + a[1:] - 2.0 * a[0]) * np.diff(b)))


def _outer(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[:, :, None] * v[:, None, :]


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Per-interval trapezoidal int du (x) dv for steps u (linear) and v."""
    return 0.5 * _outer(u, v)


def _translate_by_grid(X: GridRoughPath, g: np.ndarray) -> GridRoughPath:
    dw = np.diff(X.values, axis=0)
    dg = np.diff(g, axis=0)
    adj = X.adjacent2 + 0.5 * _outer(dg, dg) + _cross(dg, dw) + _cross(dw, dg)
    return GridRoughPath.build(X.values + g, adj, X.flavor, X.times)


def translate(X: GridRoughPath, h: DyadicPath) -> GridRoughPath:
    """Rough path of omega + h for a dyadic piecewise-linear h.

    Per fine interval the second level gains h's own area 0.5 dh (x) dh and
    the two cross integrals, each discretized as 0.5 dh (x) dw.
    """
    K = _depth(X)
    if h.d != X.d:
        raise ValueError(f"dimension mismatch: path {X.d}, direction {h.d}")
    if h.level > K:
        raise ValueError(f"direction level {h.level} exceeds grid depth {K}")
    return _translate_by_grid(X, h.on_grid(K))


def girsanov_path(X: GridRoughPath, h: DyadicPath, n: int) -> GridRoughPath:
    """Rough path of T_n^h(omega) = omega - omega^ad(n) + h.

    The second level is assembled term by term from the expansion of
    beta^2(omega - omega^ad + h): beta^2(omega), the adapted-adapted area,
    the two mixed omega/adapted integrals, the four h cross integrals and
    h's own area.
    """
    K = _depth(X)
    if h.d != X.d:
        raise ValueError(f"dimension mismatch: path {X.d}, direction {h.d}")
    if h.level > K:
        raise ValueError(f"direction level {h.level} exceeds grid depth {K}")
    ad = adapted_approx(X, n).values
    hv = h.on_grid(K)
    dw = np.diff(X.values, axis=0)
    da = np.diff(ad, axis=0)
    dh = np.diff(hv, axis=0)
    adj = (
        0.5 * _outer(dh, dh)
        + X.adjacent2
        + 0.5 * _outer(da, da)
        - _cross(dw, da)
        - _cross(da, dw)
        + _cross(dh, dw)
        - _cross(dh, da)
        + _cross(dw, dh)
        - _cross(da, dh)
    )
    return GridRoughPath.build(X.values - ad + hv, adj, X.flavor, X.times)


def dyadic_from_function(fn, level: int) -> DyadicPath:
    """Sample ``fn`` at the nodes i/2^level."""
    t = dyadic_times(level)
    return DyadicPath(level, np.asarray([np.atleast_1d(fn(s)) for s in t], dtype=float))


__all__.append("dyadic_from_function")
