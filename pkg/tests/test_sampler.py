import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hrp.core import Flavor, sym_antisym, verify_chen
from hrp.sampler import (
    BridgeSubdivision,
    EbmConfig,
    RngStream,
    TruncatedSeries,
    bridge_refine,
    levy_area_bridge,
    levy_area_series,
    moment_probe,
    sample_bm,
    sample_ebm,
)


def test_streams_are_reproducible_and_independent():
    a = RngStream(7).generator().standard_normal(5)
    b = RngStream(7).generator().standard_normal(5)
    c = RngStream(7, 1).generator().standard_normal(5)
    d = RngStream(8).generator().standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c) and not np.array_equal(a, d)


def test_config_validation():
    with pytest.raises(ValueError):
        EbmConfig(K=-1)
    with pytest.raises(ValueError):
        EbmConfig(K=4, d=0)
    with pytest.raises(ValueError):
        BridgeSubdivision(-1)
    with pytest.raises(ValueError):
        TruncatedSeries(0)


def test_quadratic_variation_of_sampled_bm():
    v = sample_bm(14, 3, np.random.default_rng(0))
    qv = np.sum(np.diff(v, axis=0) ** 2, axis=0)
    # std of the sum is sqrt(2 / N) ~ 0.011
    np.testing.assert_allclose(qv, 1.0, atol=0.05)
    assert np.all(v[0] == 0)


def test_bridge_refine_keeps_nodes_and_has_quarter_variance():
    rng = np.random.default_rng(1)
    coarse = sample_bm(3, 2, rng)
    fine = bridge_refine(coarse, rng)
    assert np.array_equal(fine[::2], coarse)
    mids = np.stack([bridge_refine(coarse, rng)[1::2] for _ in range(4000)])
    resid = mids - 0.5 * (coarse[:-1] + coarse[1:])
    np.testing.assert_allclose(resid.var(axis=0), (1 / 8) / 4, rtol=0.1)


@given(st.integers(0, 2**31 - 1), st.sampled_from(["bridge", "series"]), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_ebm_is_chen_consistent_and_geometric(seed, kind, d):
    method = BridgeSubdivision(3) if kind == "bridge" else TruncatedSeries(8)
    X = sample_ebm(EbmConfig(6, d, method), RngStream(seed).generator())
    assert X.flavor is Flavor.STRATONOVICH
    assert verify_chen(X, tol=1e-10).passed
    S, _ = sym_antisym(X.adjacent2)
    steps = np.diff(X.values, axis=0)
    half = 0.5 * steps[:, :, None] * steps[:, None, :]
    assert np.max(np.abs(S - half)) <= 1e-12 * (1 + np.max(np.abs(X.values)) ** 2)


def test_ito_sample_is_converted():
    cfg = EbmConfig(5, 2, BridgeSubdivision(2), Flavor.ITO)
    X = sample_ebm(cfg, RngStream(3).generator())
    S = sample_ebm(EbmConfig(5, 2, BridgeSubdivision(2)), RngStream(3).generator())
    assert X.flavor is Flavor.ITO
    dt = np.diff(X.times)
    assert np.array_equal(X.adjacent2[:, 0, 0], S.adjacent2[:, 0, 0] - 0.5 * dt)
    assert np.array_equal(X.adjacent2[:, 0, 1], S.adjacent2[:, 0, 1])


def test_one_dimensional_area_is_exact():
    v = sample_bm(4, 1, np.random.default_rng(0))
    adj = levy_area_bridge(v, 0, np.random.default_rng(1))
    assert np.array_equal(adj[:, 0, 0], 0.5 * np.diff(v[:, 0]) ** 2)


def _pl_area(values):
    steps = np.diff(values, axis=-2)
    anchor = values[..., :-1, :] - values[..., :1, :]
    return 0.5 * np.sum(anchor[..., 0] * steps[..., 1] - anchor[..., 1] * steps[..., 0], axis=-1)


def test_bridge_area_matches_direct_fine_simulation():
    # depth-14 random walk versus 14 bridge levels on one unit interval
    depth, samples = 14, 2000
    rng = np.random.default_rng(2)
    walks = np.zeros((samples, 2**depth + 1, 2))
    np.cumsum(rng.standard_normal((samples, 2**depth, 2)) * 2 ** (-depth / 2), axis=1,
              out=walks[:, 1:])
    direct = _pl_area(walks)
    bridge = np.empty(samples)
    for k in range(samples):
        ends = np.vstack([np.zeros(2), rng.standard_normal(2)])
        bridge[k] = levy_area_bridge(ends, depth, rng)[0, 0, 1] - 0.5 * ends[1, 0] * ends[1, 1]
    exact = 0.25 * (1 - 2.0**-depth)
    se = np.sqrt(2.0 / samples) * exact * 1.5
    assert abs(direct.var() - exact) < 4 * se
    assert abs(bridge.var() - exact) < 4 * se
    assert abs(direct.var() - bridge.var()) < 5 * se


def test_series_conditional_variance():
    h = 0.25
    inc = np.array([0.3, -0.4])
    rng = np.random.default_rng(4)
    A = np.array([levy_area_series(inc, h, 64, rng)[0, 1] - 0.5 * inc[0] * inc[1]
                  for _ in range(6000)])
    exact = h / 12 * (h + inc @ inc)
    truncation = h**2 / (2 * np.pi**2) * (1 / 64)
    assert abs(A.mean()) < 4 * A.std() / np.sqrt(A.size)
    assert abs(A.var() - exact) < 4 * exact * np.sqrt(2 / A.size) + truncation


def test_series_and_bridge_area_moments_agree():
    rng = np.random.default_rng(5)
    n = 4000
    ser = sample_ebm(EbmConfig(0, 2, TruncatedSeries(64)), rng)
    assert ser.N == 1
    a_ser = np.array([sample_ebm(EbmConfig(0, 2, TruncatedSeries(64)), rng).adjacent2[0]
                      for _ in range(n)])
    a_bri = np.array([sample_ebm(EbmConfig(0, 2, BridgeSubdivision(10)), rng).adjacent2[0]
                      for _ in range(n)])
    A_ser = sym_antisym(a_ser)[1][:, 0, 1]
    A_bri = sym_antisym(a_bri)[1][:, 0, 1]
    v_s, v_b = A_ser.var(), A_bri.var()
    se = 0.25 * np.sqrt(2.0 / n) * 1.5
    assert abs(v_s - 0.25) < 4 * se and abs(v_b - 0.25) < 4 * se
    # fourth moments: both close to the common law
    k_s = np.mean(A_ser**4) / v_s**2
    k_b = np.mean(A_bri**4) / v_b**2
    assert abs(k_s - k_b) < 1.0


def test_moment_probe_errors_and_zero_pair():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        moment_probe(2.5, [(0, 0.5, 0, 0.25)], 10, rng)
    with pytest.raises(ValueError):
        moment_probe(2.5, [(0, 0.3, 0, 0.25)], 200, rng)
    with pytest.raises(ValueError):
        moment_probe(2.5, [(0, 0.5, 0, 0.25)], 200, rng, component=(1, 1))
    est = moment_probe(2.5, [(0.25, 0.5, 0.25, 0.5)], 200, rng, EbmConfig(4, 2, BridgeSubdivision(2)))
    assert est[0].mean == 0.0 and est[0].std_err == 0.0


def test_moment_probe_disjoint_closed_form():
    cfg = EbmConfig(5, 2, BridgeSubdivision(4))
    (e,) = moment_probe(2.5, [(0.0, 0.5, 0.5, 1.0)], 4000, np.random.default_rng(9), cfg)
    exact = 0.5 * 2 * 0.5**0.4
    # the bridge area misses 1/64 of the variance of each half
    assert abs(e.mean - exact) < 4 * e.std_err + 0.02


def test_terminal_value_moments():
    # 10^4 independent depth-1 paths from distinct seeds
    v = np.array([sample_bm(1, 1, RngStream(s).generator())[:, 0] for s in range(10_000)])
    end = v[:, 2]
    n = end.size
    assert abs(end.mean()) < 5 * end.std() / np.sqrt(n)
    assert abs(end.var() - 1.0) < 5 * np.sqrt(2.0 / n)
    first, second = v[:, 1], v[:, 2] - v[:, 1]
    cov = np.mean(first * second) - first.mean() * second.mean()
    assert abs(cov) < 5 * 0.5 / np.sqrt(n)


def test_bridge_midpoint_mean():
    rng = np.random.default_rng(11)
    ends = np.array([[0.0], [1.0]])
    mids = np.array([bridge_refine(ends, rng)[1, 0] for _ in range(10_000)])
    se = mids.std() / np.sqrt(mids.size)
    assert abs(mids.mean() - 0.5) < 5 * se
    assert abs(mids.var() - 0.25) < 5 * 0.25 * np.sqrt(2.0 / mids.size)


def test_zero_levels_give_the_polygon_tensor():
    v = sample_bm(3, 2, np.random.default_rng(1))
    adj = levy_area_bridge(v, 0, np.random.default_rng(2))
    dv = np.diff(v, axis=0)
    assert np.array_equal(adj, 0.5 * dv[:, :, None] * dv[:, None, :])


def test_series_scalar_and_symmetric_part():
    rng = np.random.default_rng(3)
    out = levy_area_series(np.array([0.7]), 0.5, 16, rng)
    assert out.shape == (1, 1) and out[0, 0] == 0.5 * 0.7**2
    inc = np.array([0.3, -1.1, 0.4])
    M = levy_area_series(inc, 0.5, 16, rng)
    S, _ = sym_antisym(M)
    np.testing.assert_allclose(S, 0.5 * np.outer(inc, inc), rtol=0, atol=1e-15)
