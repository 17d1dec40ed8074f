import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrp.approx import (
    DyadicPath,
    _translate_by_grid,
    adapted_approx,
    coarsen,
    cross_young,
    dyadic_from_function,
    girsanov_path,
    interpolate_dyadic,
    pl_lift,
    translate,
)
from hrp.core import (
    Flavor,
    HolderParams,
    rho,
    sym_antisym,
    tolerance_scale,
    verify_chen,
    zero_path,
)
from oracles import riemann_iterated
from conftest import ebm

P = HolderParams(2.5, 0.05, 8)


@given(st.integers(0, 2**31 - 1), st.integers(0, 4), st.integers(0, 4), st.integers(1, 3))
@settings(max_examples=30)
def test_interpolation_reproduces_coarse_nodes(seed, m, extra, d):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((2**m + 1, d))
    fine = interpolate_dyadic(v, m + extra)
    assert fine.shape == (2 ** (m + extra) + 1, d)
    assert np.array_equal(fine[:: 2**extra], v)


def test_interpolation_errors():
    with pytest.raises(ValueError):
        interpolate_dyadic(np.zeros((4, 1)), 3)
    with pytest.raises(ValueError):
        interpolate_dyadic(np.zeros((9, 1)), 2)
    with pytest.raises(ValueError):
        DyadicPath(2, np.zeros((4, 1)))
    with pytest.raises(ValueError):
        DyadicPath(1, np.array([0.0, np.nan, 1.0]))


@given(st.integers(0, 2**31 - 1), st.integers(1, 8), st.integers(1, 4))
@settings(max_examples=40)
def test_pl_lift_is_geometric(seed, K, d):
    rng = np.random.default_rng(seed)
    X = pl_lift(np.cumsum(rng.standard_normal((2**K + 1, d)), axis=0))
    assert verify_chen(X, tol=1e-10).passed
    i, j = np.sort(rng.integers(0, X.N + 1, size=(2, 50)), axis=0)
    S, _ = sym_antisym(X.level2_increments(i, j))
    dx = X.level1_increments(i, j)
    half = 0.5 * dx[:, :, None] * dx[:, None, :]
    assert np.max(np.abs(S - half)) <= 1e-12 * tolerance_scale(X)


def test_l_shaped_path_against_riemann_sums():
    h = DyadicPath(1, [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    X = pl_lift(h.on_grid(6))
    exact = np.array([[0.5, 1.0], [0.0, 0.5]])
    np.testing.assert_allclose(X.increment(0, X.N).level2, exact, atol=1e-14)

    def path(u):
        return np.array([min(2 * u, 1.0), max(2 * u - 1, 0.0)])

    np.testing.assert_allclose(riemann_iterated(path), exact, atol=1e-5)


def test_smooth_curve_against_riemann_sums():
    def path(u):
        return np.array([np.cos(2 * np.pi * u), np.sin(2 * np.pi * u)])

    X = pl_lift(dyadic_from_function(path, 10).values)
    ref = riemann_iterated(path)
    # the inscribed polygon loses area of order N^-2
    np.testing.assert_allclose(X.increment(0, X.N).level2, ref, atol=1e-4)


def test_coarsen_and_the_smooth_limit():
    X = pl_lift(np.cumsum(np.random.default_rng(0).standard_normal((2**6 + 1, 2)), axis=0))
    assert rho(coarsen(X, 6), X, P) == 0.0
    B = ebm(K=6, d=2)
    Y = coarsen(B, 3)
    assert np.array_equal(Y.values[::8], B.values[::8])
    assert Y.flavor is Flavor.SMOOTH
    with pytest.raises(ValueError):
        coarsen(B, 7)


def test_adapted_approx_is_non_anticipating():
    X = ebm(K=6, d=2, seed=1)
    n = 3
    A = adapted_approx(X, n)
    # perturb the driver after t = 1/2; the adapted path must not move before 1/2 + 1/8
    v = np.array(X.values)
    v[33:] += 1.0
    Xp = pl_lift(v)
    Ap = adapted_approx(Xp, n)
    cut = 32 + 8
    assert np.array_equal(A.values[: cut + 1], Ap.values[: cut + 1])
    assert np.all(A.values[:9] == X.values[0])


def test_cross_young_is_exact_for_linear_pieces():
    t = np.linspace(0, 1, 9)
    assert cross_young(t, t) == pytest.approx(0.5, abs=1e-15)
    assert cross_young(t, 2 * t) == pytest.approx(1.0, abs=1e-15)
    assert cross_young(np.ones(9), t) == 0.0
    with pytest.raises(ValueError):
        cross_young(t, t[:-1])


def test_translate_of_a_lift_is_the_lift_of_the_sum():
    rng = np.random.default_rng(3)
    w = np.cumsum(rng.standard_normal((2**5 + 1, 2)), axis=0)
    h = dyadic_from_function(lambda s: [np.sin(3 * s), s**2], 2)
    T = translate(pl_lift(w), h)
    L = pl_lift(w + h.on_grid(5))
    np.testing.assert_allclose(T.values, L.values, atol=1e-14)
    np.testing.assert_allclose(T.adjacent2, L.adjacent2, atol=1e-13)


def test_translate_by_zero_is_bitwise_identity():
    X = ebm(K=5, d=2)
    T = translate(X, DyadicPath.zero(2, 2))
    assert np.array_equal(T.values, X.values)
    assert np.array_equal(T.adjacent2, X.adjacent2)


def test_translate_argument_checks():
    X = ebm(K=4, d=2)
    with pytest.raises(ValueError):
        translate(X, DyadicPath.zero(2, 3))
    with pytest.raises(ValueError):
        translate(X, DyadicPath.zero(5, 2))


@given(st.integers(0, 2**20), st.integers(3, 6))
@settings(max_examples=15, deadline=None)
def test_girsanov_expansion_equals_translation_by_difference(seed, n):
    X = ebm(K=6, d=2, seed=seed)
    h = dyadic_from_function(lambda s: [np.sin(np.pi * s), s], 3)
    G = girsanov_path(X, h, n)
    ref = _translate_by_grid(X, h.on_grid(6) - adapted_approx(X, n).values)
    np.testing.assert_allclose(G.values, ref.values, atol=1e-13)
    np.testing.assert_allclose(G.adjacent2, ref.adjacent2, atol=1e-12)
    assert verify_chen(G, tol=1e-10).passed


def test_girsanov_with_zero_direction_reduces_to_residual():
    X = ebm(K=6, d=2, seed=2)
    G = girsanov_path(X, DyadicPath.zero(1, 2), 4)
    np.testing.assert_allclose(G.values, X.values - adapted_approx(X, 4).values, atol=0)


def test_dyadic_from_function():
    h = dyadic_from_function(lambda s: [s, 2 * s], 2)
    assert h.level == 2 and h.d == 2
    np.testing.assert_array_equal(h.values[:, 1], [0, 0.5, 1, 1.5, 2])
    assert np.array_equal((-h).values, -h.values)


def test_lift_of_a_line():
    v = np.array([1.0, -2.0])
    X = pl_lift(dyadic_from_function(lambda s: s * v, 4).values)
    np.testing.assert_allclose(X.increment(0, 16).level2, 0.5 * np.outer(v, v), atol=1e-15)


def test_coarsen_to_a_single_chord():
    B = ebm(K=5, d=2, seed=4)
    Y = coarsen(B, 0)
    chord = B.values[-1] - B.values[0]
    np.testing.assert_allclose(Y.increment(0, 32).level2, 0.5 * np.outer(chord, chord), atol=1e-14)


def test_adapted_increments():
    B = ebm(K=5, d=2, seed=5)
    n = 2
    A, C = adapted_approx(B, n), coarsen(B, n)
    m = 2 ** (5 - n)
    assert np.all(A.increment(0, m).level1 == 0) and np.all(A.increment(0, m).level2 == 0)
    a, c = A.increment(m, 32), C.increment(0, 32 - m)
    np.testing.assert_allclose(a.level1, c.level1, atol=1e-14)
    np.testing.assert_allclose(a.level2, c.level2, atol=1e-13)


def test_cross_young_quadratic():
    t = np.linspace(0.0, 1.0, 2**10 + 1)
    assert abs(cross_young(t, t**2) - 2 / 3) < 1e-3


def test_translate_zero_path_and_group_property():
    h = dyadic_from_function(lambda s: [np.sin(2 * s), np.cos(3 * s)], 3)
    T = translate(zero_path(2, K=6), h)
    L = pl_lift(h.on_grid(6))
    assert np.array_equal(T.values, L.values)
    np.testing.assert_allclose(T.adjacent2, L.adjacent2, atol=1e-15)
    X = ebm(K=6, d=2, seed=6)
    back = translate(translate(X, h), -h)
    scale = tolerance_scale(X)
    assert np.max(np.abs(back.values - X.values)) <= 1e-10 * scale
    assert np.max(np.abs(back.prefix2 - X.prefix2)) <= 1e-10 * scale


def test_girsanov_at_full_depth_with_own_nodes():
    X = ebm(K=5, d=2, seed=7)
    h = DyadicPath(5, X.values)
    G = girsanov_path(X, h, 5)
    # omega - omega^ad(K) + h: check against the definition node by node
    np.testing.assert_allclose(G.values, X.values - adapted_approx(X, 5).values + X.values, atol=0)
    G0 = girsanov_path(X, DyadicPath(5, np.zeros_like(X.values)), 5)
    assert np.array_equal(G0.values + adapted_approx(X, 5).values, X.values)
