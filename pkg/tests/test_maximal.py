"""Maximal-function tests: exact invariants, oracle comparisons, estimates."""
import numpy as np
import pytest

from manistoch.errors import InsufficientSamplesError, UsageError
from manistoch.geometry import Manifold, sample_uniform_batch
from manistoch.geometry import sphere as sphere_geom
from manistoch.maximal import (ScalarFieldSamples, default_test_family,
                               maximal_function, maximal_function_batch,
                               radius_grid, verify_lipschitz_estimate,
                               verify_lp_bound)

S2, T2 = Manifold.SPHERE2, Manifold.TORUS2


def test_constant_function_gives_constant():
    cloud = ScalarFieldSamples.from_function(S2, lambda p: np.full(len(p), 3.25),
                                             n=20_000, rng_seed=0)
    xs = sample_uniform_batch(S2, 20, 1)
    got = maximal_function_batch(cloud, xs, R=0.5)
    np.testing.assert_array_equal(got, 3.25)


def test_indicator_inside_support_is_one():
    cloud = ScalarFieldSamples.from_function(
        S2, lambda p: (p[:, 2] > 0).astype(float), n=50_000, rng_seed=0)
    north = np.array([[0.0, 0.0, 1.0]])
    assert maximal_function(cloud, north[0], R=0.3) == 1.0


def test_monotone_in_R_exact():
    cloud = ScalarFieldSamples.from_function(
        S2, lambda p: np.abs(p[:, 0]) + 0.2, n=50_000, rng_seed=2)
    xs = sample_uniform_batch(S2, 50, 3)
    m1 = maximal_function_batch(cloud, xs, R=0.2)
    m2 = maximal_function_batch(cloud, xs, R=0.35)
    m3 = maximal_function_batch(cloud, xs, R=0.5)
    assert np.all(m1 <= m2) and np.all(m2 <= m3)


def test_sublinear_and_pointwise_monotone():
    pts = sample_uniform_batch(S2, 50_000, 4)
    f = np.abs(pts[:, 1])
    g = pts[:, 2] ** 2
    cf = ScalarFieldSamples(S2, pts, f)
    cg = ScalarFieldSamples(S2, pts, g)
    cfg = ScalarFieldSamples(S2, pts, f + g)
    xs = sample_uniform_batch(S2, 64, 5)
    mf = maximal_function_batch(cf, xs, R=0.5)
    mg = maximal_function_batch(cg, xs, R=0.5)
    mfg = maximal_function_batch(cfg, xs, R=0.5)
    # exact up to floating-point summation reordering
    assert np.all(mfg <= mf + mg + 1e-12)
    assert np.all(mf <= maximal_function_batch(ScalarFieldSamples(S2, pts, f + 0.5),
                                               xs, R=0.5) + 1e-12)


def test_sup_dominates_largest_ball_average():
    cloud = ScalarFieldSamples.from_function(
        T2, lambda p: np.cos(p[:, 0]) + 1.5, n=50_000, rng_seed=6)
    xs = sample_uniform_batch(T2, 30, 7)
    R = 0.5
    radii = radius_grid(T2, R)
    m = maximal_function_batch(cloud, xs, R)
    from manistoch.geometry import torus as torus_geom
    for x, mv in zip(xs, m):
        d = torus_geom.dist(x, cloud.points)
        mask = d < radii[-1]
        assert mask.any()
        assert mv >= cloud.values[mask].mean() - 1e-12


def test_empty_cloud_raises():
    cloud = ScalarFieldSamples.from_function(S2, lambda p: np.ones(len(p)),
                                             n=20, rng_seed=8)
    with pytest.raises(InsufficientSamplesError):
        # 20 points cannot populate a ball of radius ~ rho * 2^-7.5 around
        # every evaluation point, and sometimes not even the largest one
        xs = sample_uniform_batch(S2, 200, 9)
        got = maximal_function_batch(cloud, xs, R=0.01)


def test_negative_values_rejected():
    cloud = ScalarFieldSamples.from_function(S2, lambda p: p[:, 2], n=100, rng_seed=0)
    with pytest.raises(UsageError):
        maximal_function(cloud, np.array([0.0, 0.0, 1.0]), R=0.5)


def test_refinement_oracle_ten_percent():
    # |grad u| for u = sin(theta) = sqrt(1 - z^2)... use |grad z| = sin(theta)
    def gradu(p):
        return np.sqrt(np.maximum(0.0, 1.0 - p[:, 2] ** 2))

    xs = sample_uniform_batch(S2, 100, 11)
    coarse = ScalarFieldSamples.from_function(S2, gradu, n=50_000, rng_seed=12)
    dense = ScalarFieldSamples.from_function(S2, gradu, n=500_000, rng_seed=13)
    mc = maximal_function_batch(coarse, xs, R=0.5)
    md = maximal_function_batch(dense, xs, R=0.5)
    rel = np.abs(mc - md) / np.maximum(md, 1e-12)
    assert np.percentile(rel, 95) < 0.10


# --- L^p bound -------------------------------------------------------------------

def test_lp_bound_constant_ratio_one():
    rep = verify_lp_bound(S2, p=2.0, R=0.5, n_eval=50, rng_seed=0, cloud_n=20_000,
                          family=[("constant", lambda p: np.ones(len(p)))])
    assert rep.max_ratio == pytest.approx(1.0, abs=1e-12)


def test_lp_bound_family_bounded_and_stable():
    rep1 = verify_lp_bound(S2, p=1.5, R=0.5, n_eval=100, rng_seed=1, cloud_n=50_000)
    rep2 = verify_lp_bound(S2, p=1.5, R=0.5, n_eval=100, rng_seed=1, cloud_n=100_000)
    assert rep1.max_ratio < 10.0
    for (n1, r1), (n2, r2) in zip(rep1.rows, rep2.rows):
        assert abs(r1 - r2) / r2 < 0.2


def test_lp_bound_requires_p_above_one():
    with pytest.raises(UsageError):
        verify_lp_bound(S2, p=1.0, R=0.5)


# --- Lipschitz estimate ------------------------------------------------------------

def test_lipschitz_constant_function_all_skipped():
    rep = verify_lipschitz_estimate(
        S2, u_fn=lambda p: np.full(len(p), 2.0),
        grad_norm_fn=lambda p: np.zeros(len(p)),
        n_pairs=2000, rng_seed=0, cloud_n=20_000)
    assert rep.violations == 0
    assert rep.n_used == 0


def test_lipschitz_smooth_coordinate_function():
    # u = theta = arccos z away from the poles; |grad u| = 1, so the
    # mean-value bound gives K <= 1/2 up to cloud noise
    def u(p):
        return np.arccos(np.clip(p[:, 2], -1, 1))

    def gradu(p):
        return np.ones(len(p))

    def away_from_poles(x, y):
        return (np.abs(x[:, 2]) < 0.9) & (np.abs(y[:, 2]) < 0.9)

    rep = verify_lipschitz_estimate(S2, u, gradu, n_pairs=2500, rng_seed=1,
                                    cloud_n=50_000, pair_filter=away_from_poles)
    assert rep.violations == 0
    assert rep.percentile_999 <= 0.5 * 1.1


def test_lipschitz_rough_function_stable_under_refinement():
    gamma = 0.6

    def u(p):
        return np.abs(np.arcsin(np.clip(p[:, 2], -1, 1))) ** gamma

    def gradu(p):
        z = np.clip(p[:, 2], -1, 1)
        with np.errstate(divide="ignore"):
            return gamma * np.abs(np.arcsin(z)) ** (gamma - 1.0)

    r1 = verify_lipschitz_estimate(S2, u, gradu, n_pairs=2000, rng_seed=2,
                                   cloud_n=30_000)
    r2 = verify_lipschitz_estimate(S2, u, gradu, n_pairs=4000, rng_seed=3,
                                   cloud_n=60_000)
    assert np.isfinite(r1.percentile_999) and np.isfinite(r2.percentile_999)
    assert abs(r1.percentile_999 - r2.percentile_999) / r2.percentile_999 < 0.5
