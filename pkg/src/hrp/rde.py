"""The Ito-map: solving dy = f(y) dx driven by a grid rough path.

One second-order (Davie) step per grid interval,

    y_{i+1} = y_i + f(y_i) X^1_i + sum_{b,c,e} d_b f^a_e(y_i) f^b_c(y_i) X^{2,ce}_i,

and a first-order lift of the solution, Y^2_i = f(y_i) X^2_i f(y_i)^T,
composed by Chen.  Hypotheses on f (C^3, globally Lipschitz) are the
caller's contract; only a finite-difference consistency check of the
supplied derivative is offered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from hrp.approx import DyadicPath, interpolate_dyadic, pl_lift
from hrp.core import Flavor, GridRoughPath, HolderParams, holder_norm, rho

__all__ = [
    "VectorFieldSpec",
    "SolutionPath",
    "BlowUpError",
    "zero_field",
    "constant_field",
    "linear_scalar_field",
    "FIELDS",
    "solve",
    "lift_solution",
    "ito_map_path",
    "LipschitzProbe",
    "lipschitz_probe",
    "control_ode",
    "ControlReport",
    "control_report",
]


class BlowUpError(FloatingPointError):
    def __init__(self, step: int):
        super().__init__(f"solution became non-finite at step {step}")
        self.step = step


@dataclass(frozen=True)
class VectorFieldSpec:
    """f: R^N -> L(R^d, R^N) with derivative.

    ``eval(y)`` returns an (N, d) matrix, ``deriv(y)`` an (N, N, d) array
    with ``deriv(y)[a, b, e] = d f^a_e / d y^b``.
    """

    N: int
    d: int
    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    lipschitz_hint: float | None = None
    name: str = "custom"

    def check_derivative(self, rng: np.random.Generator, probes: int = 8,
                         rel_tol: float = 1e-5, step: float = 1e-6) -> float:
        """Worst relative gap between ``deriv`` and central differences."""
        worst = 0.0
        for _ in range(probes):
            y = rng.standard_normal(self.N)
            fd = np.empty((self.N, self.N, self.d))
            for b in range(self.N):
                e = np.zeros(self.N)
                e[b] = step
                fd[:, b, :] = (self.eval(y + e) - self.eval(y - e)) / (2 * step)
            exact = self.deriv(y)
            gap = np.max(np.abs(fd - exact)) / max(1.0, np.max(np.abs(exact)))
            worst = max(worst, float(gap))
        if worst > rel_tol:
            raise ValueError(f"derivative of field {self.name!r} is inconsistent (gap {worst:.3g})")
        return worst


def zero_field(N: int, d: int) -> VectorFieldSpec:
    return VectorFieldSpec(
        N, d, lambda y: np.zeros((N, d)), lambda y: np.zeros((N, N, d)), 0.0, "zero"
    )


def constant_field(c) -> VectorFieldSpec:
    c = np.atleast_2d(np.asarray(c, dtype=float))
    N, d = c.shape
    return VectorFieldSpec(
        N, d, lambda y: c, lambda y: np.zeros((N, N, d)), float(np.linalg.norm(c, 2)), "constant"
    )


def linear_scalar_field(scale: float = 1.0) -> VectorFieldSpec:
    """f(y) = scale * y with N = d = 1."""
    return VectorFieldSpec(
        1, 1,
        lambda y: np.array([[scale * y[0]]]),
        lambda y: np.array([[[scale]]]),
        abs(scale),
        "linear-scalar",
    )


def _rotation_field() -> VectorFieldSpec:
    # f(y) = (cos y, sin y) on N = 1, d = 2: bounded with bounded derivatives
    return VectorFieldSpec(
        1, 2,
        lambda y: np.array([[np.cos(y[0]), np.sin(y[0])]]),
        lambda y: np.array([[[-np.sin(y[0]), np.cos(y[0])]]]),
        1.0,
        "trig",
    )


FIELDS: dict[str, Callable[[], VectorFieldSpec]] = {
    "linear-scalar": linear_scalar_field,
    "trig": _rotation_field,
}


@dataclass(frozen=True)
class SolutionPath:
    times: np.ndarray
    values: np.ndarray
    driver_flavor: str
    lifted: GridRoughPath | None = None

    @property
    def y0(self) -> np.ndarray:
        return self.values[0]


def _check_dims(X: GridRoughPath, f: VectorFieldSpec, y0: np.ndarray):
    if f.d != X.d:
        raise ValueError(f"field expects d={f.d}, driver has d={X.d}")
    if y0.shape != (f.N,):
        raise ValueError(f"y0 must have shape ({f.N},)")


def solve(X: GridRoughPath, f: VectorFieldSpec, y0, substeps: int = 1) -> SolutionPath:
    """Davie scheme on the driver's grid.

    ``substeps`` = 2^r > 1 re-lifts a smooth (piecewise-linear) driver on a
    grid r levels finer and reports the solution at the original nodes; for
    stochastic drivers the area below the mesh is unknown, so it is refused.
    """
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    _check_dims(X, f, y0)
    if substeps != 1:
        r = int(substeps).bit_length() - 1
        if substeps < 1 or 2**r != substeps:
            raise ValueError("substeps must be a power of two")
        if X.flavor is not Flavor.SMOOTH or X.K is None:
            raise ValueError("substeps needs a smooth driver on a dyadic grid")
        fine = pl_lift(interpolate_dyadic(X.values, X.K + r))
        sol = solve(fine, f, y0)
        return SolutionPath(X.times, sol.values[::substeps], X.flavor.value)
    steps = np.diff(X.values, axis=0)
    out = np.empty((X.N + 1, f.N))
    out[0] = y0
    y = y0
    for i in range(X.N):
        F = f.eval(y)
        DF = f.deriv(y)
        # contract d_b f^a_e f^b_c against X^{2,ce}
        second = np.einsum("abe,bc,ce->a", DF, F, X.adjacent2[i])
        y = y + F @ steps[i] + second
        if not np.all(np.isfinite(y)):
            raise BlowUpError(i)
        out[i + 1] = y
    return SolutionPath(X.times, out, X.flavor.value)


def lift_solution(sol: SolutionPath, X: GridRoughPath, f: VectorFieldSpec) -> GridRoughPath:
    if not np.array_equal(sol.times, X.times):
        raise ValueError("solution was not computed on this driver's grid")
    adj = np.empty((X.N, f.N, f.N))
    for i in range(X.N):
        F = f.eval(sol.values[i])
        adj[i] = F @ X.adjacent2[i] @ F.T
    return GridRoughPath.build(sol.values, adj, X.flavor, X.times)


def ito_map_path(X: GridRoughPath, f: VectorFieldSpec, y0) -> np.ndarray:
    """Phi_t = y0 + Y^1_{0,t} at the grid nodes."""
    return solve(X, f, y0).values


@dataclass(frozen=True)
class LipschitzProbe:
    rho_in: float
    rho_out: float
    ratio: float
    degenerate: bool = False


def lipschitz_probe(f: VectorFieldSpec, X: GridRoughPath, Xhat: GridRoughPath,
                    params: HolderParams, y0) -> LipschitzProbe:
    """rho(Y, Yhat) / rho(X, Xhat) for the lifted solutions of two drivers."""
    rho_in = rho(X, Xhat, params)
    if rho_in == 0.0:
        return LipschitzProbe(0.0, 0.0, float("nan"), degenerate=True)
    Y = lift_solution(solve(X, f, y0), X, f)
    Yhat = lift_solution(solve(Xhat, f, y0), Xhat, f)
    rho_out = rho(Y, Yhat, params)
    return LipschitzProbe(rho_in, rho_out, rho_out / rho_in)


def control_ode(h: DyadicPath, f: VectorFieldSpec, y0, refine: int = 4) -> np.ndarray:
    """Solve dy = f(y) dh on the grid of depth h.level + refine."""
    K = h.level + refine
    return solve(pl_lift(h.on_grid(K)), f, y0).values


@dataclass(frozen=True)
class ControlReport:
    C_in: float
    C_out: float
    ok: bool
    ratio: float


def control_report(X: GridRoughPath, Y: GridRoughPath, params: HolderParams) -> ControlReport:
    """Grid additive-control constants of a driver and its lifted solution."""
    if not np.array_equal(X.times, Y.times):
        raise ValueError("driver and solution live on different grids")
    C_in = holder_norm(X, params).control_constant
    C_out = holder_norm(Y, params).control_constant
    return ControlReport(C_in, C_out, bool(np.isfinite(C_out)), C_out / max(C_in, 1.0))
