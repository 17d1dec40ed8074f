"""Level-2 rough paths on a time grid: Chen algebra, norms and metrics.

A :class:`GridRoughPath` stores the path values at the grid nodes, the
second-level tensor of every elementary interval and a Chen prefix
``prefix2[i] = X^2_{t_0, t_i}``.  Any increment is recovered in O(1) from the
prefix with the inverted Chen relation

    X^2_{s,u} = X^2_{0,u} - X^2_{0,s} - X^1_{0,s} (x) X^1_{s,u}.

Norms: Euclidean on R^d, Frobenius on R^{d x d}.  Every supremum and every
partition is restricted to grid points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from hrp import _kernels

__all__ = [
    "Flavor",
    "RoughIncrement",
    "GridRoughPath",
    "HolderParams",
    "NormReport",
    "ChenReport",
    "ZField",
    "chen_compose",
    "increment",
    "verify_chen",
    "holder_norm",
    "rho",
    "rho_report",
    "rho_zones",
    "pvar_dist",
    "sym_antisym",
    "convert_flavor",
    "z_field",
    "two_param_holder_estimate",
    "tau_shift",
    "zero_path",
    "dyadic_times",
    "tolerance_scale",
]


class Flavor(str, enum.Enum):
    STRATONOVICH = "stratonovich"
    ITO = "ito"
    SMOOTH = "smooth"


@dataclass(frozen=True)
class RoughIncrement:
    """One pair (X^1_{s,t}, X^2_{s,t})."""

    level1: np.ndarray
    level2: np.ndarray

    @property
    def dim(self) -> int:
        return self.level1.shape[0]

    @classmethod
    def zero(cls, d: int) -> "RoughIncrement":
        return cls(np.zeros(d), np.zeros((d, d)))


def chen_compose(a: RoughIncrement, b: RoughIncrement) -> RoughIncrement:
    """Concatenate an increment over [s,t] with one over [t,u]."""
    if a.level1.shape != b.level1.shape or a.level2.shape != b.level2.shape:
        raise ValueError(
            f"dimension mismatch: {a.level1.shape} vs {b.level1.shape}"
        )
    return RoughIncrement(
        a.level1 + b.level1,
        a.level2 + b.level2 + np.outer(a.level1, b.level1),
    )


def dyadic_times(K: int) -> np.ndarray:
    n = 2**K
    return np.arange(n + 1, dtype=float) / n


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def build_prefix(values: np.ndarray, adjacent2: np.ndarray) -> np.ndarray:
    """Chen prefixes X^2_{t_0,t_i}, built left to right."""
    n, d = adjacent2.shape[0], values.shape[1]
    steps = np.diff(values, axis=0)
    anchor = values[:-1] - values[0]
    terms = adjacent2 + anchor[:, :, None] * steps[:, None, :]
    prefix = np.zeros((n + 1, d, d))
    np.cumsum(terms, axis=0, out=prefix[1:])
    return prefix


@dataclass(frozen=True, eq=False)
class GridRoughPath:
    """Level-2 rough path known at the nodes of a time grid on [0, 1].

    Use :meth:`build` to construct one from values and per-interval tensors;
    the raw constructor trusts the given ``prefix2`` and exists for
    deserialization and fault-injection tests.
    """

    times: np.ndarray
    values: np.ndarray
    adjacent2: np.ndarray
    prefix2: np.ndarray
    flavor: Flavor
    # pre-image under convert_flavor, so a round trip is bit-exact
    _source: "GridRoughPath | None" = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("times", "values", "adjacent2", "prefix2"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        n1, d = self.values.shape
        if self.times.shape != (n1,):
            raise ValueError("times and values disagree in length")
        if n1 < 2:
            raise ValueError("a grid path needs at least two nodes")
        if self.adjacent2.shape != (n1 - 1, d, d):
            raise ValueError(f"adjacent2 must have shape {(n1 - 1, d, d)}")
        if self.prefix2.shape != (n1, d, d):
            raise ValueError(f"prefix2 must have shape {(n1, d, d)}")
        if not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if self.times[0] != 0.0 or self.times[-1] != 1.0:
            raise ValueError("times must start at 0 and end at 1")

    @classmethod
    def build(cls, values, adjacent2, flavor=Flavor.SMOOTH, times=None):
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        adjacent2 = np.asarray(adjacent2, dtype=float)
        if times is None:
            n = values.shape[0] - 1
            times = np.arange(n + 1, dtype=float) / n
        return cls(times, values, adjacent2, build_prefix(values, adjacent2), flavor)

    @property
    def N(self) -> int:
        return self.values.shape[0] - 1

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def K(self) -> int | None:
        """Grid depth when the grid is uniform dyadic, else None."""
        n = self.N
        if n & (n - 1):
            return None
        k = n.bit_length() - 1
        if not np.array_equal(self.times, dyadic_times(k)):
            return None
        return k

    def increment(self, i: int, j: int) -> RoughIncrement:
        return increment(self, i, j)

    def level2_increments(self, i, j) -> np.ndarray:
        """Vectorized second-level increments for index arrays i <= j."""
        i = np.asarray(i)
        j = np.asarray(j)
        v, p = self.values, self.prefix2
        return (p[j] - p[i]) - (v[i] - v[0])[..., :, None] * (v[j] - v[i])[..., None, :]

    def level1_increments(self, i, j) -> np.ndarray:
        return self.values[np.asarray(j)] - self.values[np.asarray(i)]


def zero_path(d: int, times: np.ndarray | None = None, K: int | None = None,
              flavor=Flavor.SMOOTH) -> GridRoughPath:
    if times is None:
        times = dyadic_times(K)
    n = len(times) - 1
    return GridRoughPath.build(np.zeros((n + 1, d)), np.zeros((n, d, d)), flavor, times)


def increment(X: GridRoughPath, i: int, j: int) -> RoughIncrement:
    if not (0 <= i <= j <= X.N):
        raise IndexError(f"need 0 <= i <= j <= {X.N}, got ({i}, {j})")
    v, p = X.values, X.prefix2
    step = v[j] - v[i]
    level2 = (p[j] - p[i]) - np.outer(v[i] - v[0], step)
    return RoughIncrement(step, level2)


def tolerance_scale(X: GridRoughPath) -> float:
    return 1.0 + float(np.max(np.abs(X.values))) ** 2


@dataclass(frozen=True)
class ChenReport:
    max_violation: float
    scale: float
    tol: float
    passed: bool


def verify_chen(X: GridRoughPath, triples: int = 200, tol: float = 1e-12,
                rng: np.random.Generator | None = None) -> ChenReport:
    """Check the Chen relation on sampled grid triples i <= j <= k.

    Besides the sampled triples, every stored interval is checked against
    the prefix it was folded into (the triple (0, i, i+1) evaluated with the
    stored ``adjacent2[i]``), so a corrupted cell is always caught.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rng = np.random.default_rng(0) if rng is None else rng
    v, p, a = X.values, X.prefix2, X.adjacent2
    worst = 0.0

    # stored cells against the prefix
    folded = p[:-1] + a + (v[:-1] - v[0])[:, :, None] * np.diff(v, axis=0)[:, None, :]
    if X.N > 0:
        worst = float(np.max(np.abs(p[1:] - folded)))

    if triples > 0:
        ijk = np.sort(rng.integers(0, X.N + 1, size=(triples, 3)), axis=1)
        i, j, k = ijk.T
        lhs = X.level2_increments(i, k)
        a1, b1 = X.level1_increments(i, j), X.level1_increments(j, k)
        rhs = X.level2_increments(i, j) + X.level2_increments(j, k) + a1[:, :, None] * b1[:, None, :]
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        worst = max(worst, float(np.max(np.abs(X.level1_increments(i, k) - (a1 + b1)))))

    scale = tolerance_scale(X)
    return ChenReport(worst, scale, tol, worst <= tol * scale)


@dataclass(frozen=True)
class HolderParams:
    """Exponents p in (2, 3), gamma in (0, 1/2 - 1/p) and grid depth K."""

    p: float = 2.5
    gamma: float = 0.05
    K: int = 12

    def __post_init__(self):
        if not 2.0 < self.p < 3.0:
            raise ValueError(f"p must lie in (2, 3), got {self.p}")
        if not 0.0 < self.gamma < 0.5 - 1.0 / self.p:
            raise ValueError(
                f"gamma must lie in (0, {0.5 - 1.0 / self.p:.6g}), got {self.gamma}"
            )
        if self.K < 0:
            raise ValueError("K must be nonnegative")


@dataclass(frozen=True)
class NormReport:
    value: float
    arg_pair: tuple[int, int]
    per_level: tuple[float, float]
    level_pairs: tuple[tuple[int, int], tuple[int, int]]
    control_constant: float


def _check_same_grid(X: GridRoughPath, Y: GridRoughPath):
    if X.d != Y.d:
        raise ValueError(f"dimension mismatch: {X.d} vs {Y.d}")
    if X.times.shape != Y.times.shape or not np.array_equal(X.times, Y.times):
        raise ValueError("paths live on different grids")


def _holder(X: GridRoughPath, Y: GridRoughPath | None, p: float, split: int = 0):
    if Y is None:
        vy = np.zeros_like(X.values)
        py = np.zeros_like(X.prefix2)
    else:
        vy, py = Y.values, Y.prefix2
    s1, i1, j1, s2, i2, j2, zones = _kernels.holder_scan(
        X.times, X.values, X.prefix2, vy, py, 1.0 / p, 2.0 / p, split
    )
    pair = (int(i1), int(j1)) if s1 >= s2 else (int(i2), int(j2))
    return NormReport(
        value=max(s1, s2),
        arg_pair=pair,
        per_level=(float(s1), float(s2)),
        level_pairs=((int(i1), int(j1)), (int(i2), int(j2))),
        control_constant=max(s1**p, s2 ** (p / 2.0)),
    ), zones


def holder_norm(X: GridRoughPath, params: HolderParams) -> NormReport:
    """max_k sup_{s<t} |X^k_{s,t}| / |t-s|^{k/p} over all grid pairs.

    ``control_constant`` is the smallest C with |X^k_{s,t}|^{p/k} <= C |t-s|
    on the grid.
    """
    return _holder(X, None, params.p)[0]


def rho_report(X: GridRoughPath, Y: GridRoughPath, params: HolderParams) -> NormReport:
    _check_same_grid(X, Y)
    return _holder(X, Y, params.p)[0]


def rho_zones(X: GridRoughPath, Y: GridRoughPath, params: HolderParams,
              split: int) -> tuple[NormReport, tuple[float, float, float]]:
    """rho together with its split into three pair zones around node ``split``.

    Zones: both ends at or before t_split; straddling; both at or after.
    """
    _check_same_grid(X, Y)
    report, zones = _holder(X, Y, params.p, split)
    return report, tuple(float(z) for z in zones)


def rho(X: GridRoughPath, Y: GridRoughPath, params: HolderParams) -> float:
    """Hoelder distance ||X - Y|| with levels subtracted pairwise."""
    return rho_report(X, Y, params).value


def pvar_dist(X: GridRoughPath, Y: GridRoughPath, params: HolderParams) -> float:
    """p-variation distance with partitions restricted to grid points."""
    _check_same_grid(X, Y)
    p = params.p
    b1, b2 = _kernels.pvar_dp(X.values, X.prefix2, Y.values, Y.prefix2, p, p / 2.0)
    return max(b1 ** (1.0 / p), b2 ** (2.0 / p))


def sym_antisym(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    M = np.asarray(M, dtype=float)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError("expected square matrices")
    Mt = np.swapaxes(M, -1, -2)
    return 0.5 * (M + Mt), 0.5 * (M - Mt)


def convert_flavor(X: GridRoughPath, target: Flavor) -> GridRoughPath:
    """Switch between Ito and Stratonovich second levels.

    Stratonovich = Ito + dt/2 on the diagonal of every interval tensor;
    off-diagonal entries are untouched.
    """
    target = Flavor(target)
    if X.flavor is Flavor.SMOOTH or target is Flavor.SMOOTH:
        raise ValueError("flavor conversion is defined between ito and stratonovich only")
    if target is X.flavor:
        return X
    if X._source is not None and X._source.flavor is target:
        return X._source
    sign = 0.5 if target is Flavor.STRATONOVICH else -0.5
    adj = np.array(X.adjacent2)
    idx = np.arange(X.d)
    adj[:, idx, idx] += sign * np.diff(X.times)[:, None]
    out = GridRoughPath.build(X.values, adj, target, X.times)
    object.__setattr__(out, "_source", X)
    return out


@dataclass(frozen=True)
class ZField:
    """Z^k[i, j] = X^k_{t_i,t_j} / (t_j - t_i)^{k/p} for i < j, zero otherwise."""

    times: np.ndarray
    values: np.ndarray
    k: int
    p: float


def z_field(X: GridRoughPath, params: HolderParams, k: int) -> ZField:
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    n1 = X.N + 1
    i, j = np.triu_indices(n1, 1)
    dt = X.times[j] - X.times[i]
    if k == 1:
        inc = X.level1_increments(i, j)
        table = np.zeros((n1, n1, X.d))
    else:
        inc = X.level2_increments(i, j)
        table = np.zeros((n1, n1, X.d, X.d))
    scale = dt ** (k / params.p)
    table[i, j] = inc / scale.reshape((-1,) + (1,) * (inc.ndim - 1))
    return ZField(X.times, table, k, params.p)


def _quotients(Z: ZField, a, b, c, e, exponent):
    t = Z.times
    num = Z.values[a, b] - Z.values[c, e]
    num = np.sqrt(np.sum(num.reshape(num.shape[0], -1) ** 2, axis=1))
    den = (np.abs(t[e] - t[b]) + np.abs(t[c] - t[a])) ** exponent
    return num / den


def two_param_holder_estimate(Z: ZField, exponent: float, budget: int,
                              rng: np.random.Generator) -> float:
    """Lower bound for sup |Z_{s,t} - Z_{s',t'}| / (|t'-t| + |s'-s|)^exponent.

    Scans every move to a neighbouring index pair, then ``budget`` uniformly
    drawn pairs of pairs.  Draws are prefix-stable, so for one generator
    state a larger budget never gives a smaller estimate.  Pairs touching
    the diagonal (where Z is set to zero) are included.
    """
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    n1 = Z.values.shape[0]
    if n1 < 3:
        raise ValueError("need at least two grid intervals")
    best = 0.0
    ii, jj = np.meshgrid(np.arange(n1), np.arange(n1), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    for di, dj in ((1, 0), (0, 1)):
        keep = (ii + di < n1) & (jj + dj < n1)
        a, b = ii[keep], jj[keep]
        best = max(best, float(np.max(_quotients(Z, a, b, a + di, b + dj, exponent))))
    idx = rng.integers(0, n1, size=(budget, 4))
    a, b, c, e = idx.T
    moved = (a != c) | (b != e)
    if np.any(moved):
        q = _quotients(Z, a[moved], b[moved], c[moved], e[moved], exponent)
        best = max(best, float(np.max(q)))
    return best


def tau_shift(X: GridRoughPath, eps: float) -> GridRoughPath:
    """Delay the path by ``eps``: x(.) -> x((. - eps) v 0).

    ``eps`` must be a multiple of the (uniform) mesh; nothing is interpolated.
    """
    n = X.N
    if not np.allclose(np.diff(X.times), 1.0 / n, rtol=0, atol=1e-15):
        raise ValueError("tau_shift needs a uniform grid")
    m_float = eps * n
    m = int(round(m_float))
    if eps < 0 or abs(m - m_float) > 1e-9 * max(1.0, abs(m_float)) or m > n:
        raise ValueError(f"eps={eps} is not a grid multiple in [0, 1] of mesh 1/{n}")
    if m == 0:
        return X
    src = np.maximum(np.arange(n + 1) - m, 0)
    adj = np.zeros_like(X.adjacent2)
    adj[m:] = X.adjacent2[: n - m]
    return GridRoughPath.build(X.values[src], adj, X.flavor, X.times)

