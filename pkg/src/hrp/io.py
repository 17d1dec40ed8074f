"""Columnar text formats.

Rough path file::

    d K flavor
    t_0 x_0[0] ... x_0[d-1]           (N + 1 rows)
    ...
    a_0[0,0] a_0[0,1] ... a_0[d-1,d-1] (N rows, row-major d x d)

Dyadic path file: header ``d m`` then 2^m + 1 rows of d values.
Solution file: header ``N K`` then rows ``t_i y_i[0] ... y_i[N-1]``.

Floats are written with ``repr`` (shortest round-trip decimal), so reading a
file back reproduces every bit.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from hrp.approx import DyadicPath
from hrp.core import Flavor, GridRoughPath

__all__ = [
    "write_rough_path",
    "read_rough_path",
    "write_dyadic_path",
    "read_dyadic_path",
    "write_solution",
    "read_solution",
    "FormatError",
]


class FormatError(ValueError):
    pass


def _row(xs) -> str:
    return " ".join(repr(float(x)) for x in xs)


def _lines(path) -> list[list[str]]:
    text = Path(path).read_text()
    return [ln.split() for ln in text.splitlines() if ln.strip()]


def _floats(tokens, where) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def write_rough_path(X: GridRoughPath, path) -> None:
    K = X.K
    if K is None:
        raise ValueError("only dyadic grids can be serialized")
    out = [f"{X.d} {K} {X.flavor.value}"]
    out += [_row([t, *x]) for t, x in zip(X.times, X.values)]
    out += [_row(a.ravel()) for a in X.adjacent2]
    Path(path).write_text("\n".join(out) + "\n")


def read_rough_path(path) -> GridRoughPath:
    rows = _lines(path)
    if not rows or len(rows[0]) != 3:
        raise FormatError(f"{path}: header must be 'd K flavor'")
    try:
        d, K = int(rows[0][0]), int(rows[0][1])
        flavor = Flavor(rows[0][2])
    except ValueError as exc:
        raise FormatError(f"{path}: bad header: {exc}") from None
    n = 2**K
    body = rows[1:]
    if len(body) != 2 * n + 1:
        raise FormatError(f"{path}: expected {2 * n + 1} data rows, found {len(body)}")
    nodes = np.array([_floats(r, f"{path}:{k + 2}") for k, r in enumerate(body[: n + 1])])
    if nodes.shape != (n + 1, d + 1):
        raise FormatError(f"{path}: node rows must have {d + 1} columns")
    adj = np.array([_floats(r, f"{path}:{k + n + 3}") for k, r in enumerate(body[n + 1:])])
    if adj.shape != (n, d * d):
        raise FormatError(f"{path}: tensor rows must have {d * d} columns")
    return GridRoughPath.build(nodes[:, 1:], adj.reshape(n, d, d), flavor, nodes[:, 0])


def write_dyadic_path(h: DyadicPath, path) -> None:
    out = [f"{h.d} {h.level}"] + [_row(x) for x in h.values]
    Path(path).write_text("\n".join(out) + "\n")


def read_dyadic_path(path) -> DyadicPath:
    rows = _lines(path)
    if not rows or len(rows[0]) != 2:
        raise FormatError(f"{path}: header must be 'd m'")
    d, m = int(rows[0][0]), int(rows[0][1])
    vals = np.array([_floats(r, path) for r in rows[1:]])
    if vals.shape != (2**m + 1, d):
        raise FormatError(f"{path}: expected {2**m + 1} rows of {d} values")
    return DyadicPath(m, vals)


def write_solution(times: np.ndarray, values: np.ndarray, path) -> None:
    n = len(times) - 1
    K = n.bit_length() - 1
    out = [f"{values.shape[1]} {K}"] + [_row([t, *y]) for t, y in zip(times, values)]
    Path(path).write_text("\n".join(out) + "\n")


def read_solution(path) -> tuple[np.ndarray, np.ndarray]:
    rows = _lines(path)
    N, K = int(rows[0][0]), int(rows[0][1])
    data = np.array([_floats(r, path) for r in rows[1:]])
    if data.shape != (2**K + 1, N + 1):
        raise FormatError(f"{path}: expected {2**K + 1} rows of {N + 1} values")
    return data[:, 0], data[:, 1:]
