"""Geometry kernel tests: closed-form oracles, chart identities, certification."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manistoch.errors import DegeneratePairError, UsageError
from manistoch.geometry import (Manifold, ManifoldPoint, TangentVector,
                                certify_atlas, chart_shooting_distance,
                                default_atlas, distance, grad_dist,
                                grad_dist_sq, minimizing_geodesic,
                                parallel_transport, partition_weights,
                                sample_pairs_within, sample_uniform_batch,
                                shooting_distance_batch, transport_batch)
from manistoch.geometry import sphere as sphere_geom
from manistoch.util import rng_stream

S2, T2 = Manifold.SPHERE2, Manifold.TORUS2


def sp(*c):
    return ManifoldPoint(S2, np.array(c, dtype=float))


def tp(*c):
    return ManifoldPoint(T2, np.array(c, dtype=float))


# --- distance -----------------------------------------------------------------

def test_distance_identity():
    assert distance(sp(0, 0, 1), sp(0, 0, 1)) == 0.0


def test_distance_orthogonal_axes():
    assert distance(sp(0, 0, 1), sp(1, 0, 0)) == pytest.approx(np.pi / 2, abs=1e-15)


def test_distance_torus_half_wrap():
    assert distance(tp(0, 0), tp(np.pi, 0)) == pytest.approx(np.pi, abs=1e-15)


def test_distance_mismatched_manifolds():
    with pytest.raises(UsageError):
        distance(sp(0, 0, 1), tp(0, 0))


def test_distance_symmetry_random():
    rng = rng_stream(1, "sym")
    x = sphere_geom.sample_uniform(100, rng)
    y = sphere_geom.sample_uniform(100, rng)
    d1 = sphere_geom.dist(x, y)
    d2 = sphere_geom.dist(y, x)
    np.testing.assert_array_equal(d1, d2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    for man in (S2, T2):
        pts = sample_uniform_batch(man, 3, seed, stream=("tri",))
        a, b, c = (ManifoldPoint(man, p) for p in pts)
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


@pytest.mark.parametrize("man", [S2, T2])
def test_triangle_inequality_bulk(man):
    from manistoch.geometry import sphere, torus
    geom = sphere if man is S2 else torus
    a = sample_uniform_batch(man, 1000, 41, stream=("tri_a",))
    b = sample_uniform_batch(man, 1000, 41, stream=("tri_b",))
    c = sample_uniform_batch(man, 1000, 41, stream=("tri_c",))
    assert np.all(geom.dist(a, c) <= geom.dist(a, b) + geom.dist(b, c) + 1e-9)


# --- geodesics ------------------------------------------------------------------

def test_quarter_great_circle():
    seg = minimizing_geodesic(sp(0, 0, 1), sp(1, 0, 0))
    assert seg.length == pytest.approx(np.pi / 2, abs=1e-12)
    # path stays in the x-z plane
    assert np.max(np.abs(seg.samples[:, 1])) < 1e-12


def test_torus_straight_segment():
    seg = minimizing_geodesic(tp(0, 0), tp(1, 1))
    assert seg.length == pytest.approx(np.sqrt(2.0), abs=1e-12)


def test_geodesic_length_matches_arccos_oracle():
    rng = rng_stream(7, "geo")
    x = sphere_geom.sample_uniform(200, rng)
    y = sphere_geom.sample_uniform(200, rng)
    keep = np.arccos(np.clip(np.sum(x * y, axis=1), -1, 1)) < np.pi - 1e-3
    for xi, yi in zip(x[keep], y[keep]):
        seg = minimizing_geodesic(ManifoldPoint(S2, xi), ManifoldPoint(S2, yi))
        oracle = np.arccos(np.clip(np.dot(xi, yi), -1, 1))
        assert abs(seg.length - oracle) < 1e-8


def test_geodesic_endpoint_and_speed_invariants():
    # chord/arc FD truncation is O(ds^2); 2049 samples push it below 1e-7
    seg = minimizing_geodesic(sp(1, 0, 0), sp(0.1, 0.7, 0.3), n_samples=2049)
    np.testing.assert_allclose(seg.samples[0], seg.from_point.coords, atol=1e-8)
    np.testing.assert_allclose(seg.samples[-1], seg.to_point.coords, atol=1e-8)
    ds = seg.length / (seg.n_samples - 1)
    speed = np.linalg.norm(np.diff(seg.samples, axis=0), axis=1) / ds
    np.testing.assert_allclose(speed, 1.0, atol=1e-6)


def test_geodesic_rejects_cut_locus():
    with pytest.raises(DegeneratePairError):
        minimizing_geodesic(sp(0, 0, 1), sp(0, 0, -1))
    with pytest.raises(DegeneratePairError):
        minimizing_geodesic(tp(0, 0), tp(np.pi, np.pi))


# --- parallel transport ---------------------------------------------------------

def test_transport_zero_length_identity():
    x = sp(0, 0, 1)
    v = TangentVector(x, np.array([1.0, 0.0, 0.0]))
    seg = minimizing_geodesic(x, x)
    out = parallel_transport(v, seg)
    np.testing.assert_array_equal(out.components, v.components)


def test_transport_along_equator_keeps_north():
    x, y = sp(1, 0, 0), sp(0, 1, 0)
    v = TangentVector(x, np.array([0.0, 0.0, 1.0]))
    seg = minimizing_geodesic(x, y, n_samples=513)
    out = parallel_transport(v, seg)
    np.testing.assert_allclose(out.components, [0.0, 0.0, 1.0], atol=1e-9)


def test_transport_matches_rotation_oracle():
    rng = rng_stream(3, "par")
    x = sphere_geom.sample_uniform(50, rng)
    y = sphere_geom.sample_uniform(50, rng)
    keep = sphere_geom.dist(x, y) < np.pi - 1e-2
    x, y = x[keep], y[keep]
    v = rng.standard_normal(x.shape)
    v -= np.sum(v * x, axis=1, keepdims=True) * x
    oracle = sphere_geom.transport_oracle(x, y, v)
    for xi, yi, vi, oi in zip(x, y, v, oracle):
        seg = minimizing_geodesic(ManifoldPoint(S2, xi), ManifoldPoint(S2, yi), n_samples=513)
        got = parallel_transport(TangentVector(ManifoldPoint(S2, xi), vi), seg)
        np.testing.assert_allclose(got.components, oi, atol=1e-7)
        # isometry
        assert abs(got.norm - np.linalg.norm(vi)) < 1e-8


def test_transport_batch_matches_oracle_near_pairs():
    atlas = default_atlas(S2)
    x, y = sample_pairs_within(S2, 500, atlas.rho, 11)
    rng = rng_stream(11, "vec")
    v = rng.standard_normal(x.shape)
    v -= np.sum(v * x, axis=1, keepdims=True) * x
    got = transport_batch(atlas, x, y, v)
    oracle = sphere_geom.transport_oracle(x, y, v)
    assert np.max(np.linalg.norm(got - oracle, axis=1)) < 1e-7


def test_transport_invalid_base():
    x, y = sp(1, 0, 0), sp(0, 1, 0)
    seg = minimizing_geodesic(x, y)
    v = TangentVector(y, np.array([0.0, 0.0, 1.0]))
    from manistoch.errors import InvalidSegmentError
    with pytest.raises(InvalidSegmentError):
        parallel_transport(v, seg)


# --- distance gradients ---------------------------------------------------------

def test_grad_dist_sq_at_coincident_points():
    g = grad_dist_sq(sp(0, 0, 1), sp(0, 0, 1))
    np.testing.assert_array_equal(g.components, 0.0)


def test_grad_dist_sq_equator_example():
    g = grad_dist_sq(sp(1, 0, 0), sp(0, 1, 0))
    assert g.norm == pytest.approx(2 * (np.pi / 2), abs=1e-12)
    # points away from y along the equator: -y direction
    np.testing.assert_allclose(g.components / g.norm, [0, -1, 0], atol=1e-12)


def test_grad_dist_sq_matches_chart_finite_differences():
    atlas = default_atlas(S2)
    x, y = sample_pairs_within(S2, 40, 0.45, 23)
    h = 1e-6
    for xi, yi in zip(x, y):
        chart = atlas.charts[int(atlas.deepest_chart(xi))]
        xi_c = chart.to_chart(xi[None, :])[0]
        grads = np.empty(2)
        for k in range(2):
            e = np.zeros(2); e[k] = h
            dp = sphere_geom.dist(chart.from_chart((xi_c + e)[None, :])[0], yi)
            dm = sphere_geom.dist(chart.from_chart((xi_c - e)[None, :])[0], yi)
            grads[k] = (dp ** 2 - dm ** 2) / (2 * h)
        ginv = np.linalg.inv(chart.metric_at(xi_c[None, :])[0])
        v_chart = ginv @ grads
        oracle = chart.push(xi_c[None, :], v_chart[None, :])[0]
        got = grad_dist_sq(ManifoldPoint(S2, xi), ManifoldPoint(S2, yi))
        np.testing.assert_allclose(got.components, oracle, atol=1e-5)


def test_antisymmetry_identity_lemma_style():
    # g_x(v, grad dis(.,y)) + g_y(Pv, grad dis(x,.)) = 0
    for man, seed in ((S2, 5), (T2, 6)):
        atlas = default_atlas(man)
        x, y = sample_pairs_within(man, 100, atlas.rho, seed)
        rng = rng_stream(seed, "anti")
        v = rng.standard_normal(x.shape)
        if man is S2:
            v -= np.sum(v * x, axis=1, keepdims=True) * x
        pv = transport_batch(atlas, x, y, v)
        geom = sphere_geom if man is S2 else __import__(
            "manistoch.geometry.torus", fromlist=["torus"])
        gx = geom.grad_dist(x, y)
        gy = geom.grad_dist(y, x)
        resid = np.sum(v * gx, axis=1) + np.sum(pv * gy, axis=1)
        assert np.max(np.abs(resid)) < 1e-6


# --- charts, partition, certification -------------------------------------------

@pytest.mark.parametrize("man", [S2, T2])
def test_chart_round_trip(man):
    atlas = default_atlas(man)
    pts = sample_uniform_batch(man, 500, 9)
    from manistoch.geometry import torus as torus_geom
    for chart in atlas.charts:
        inside = chart.contains(pts)
        xi = chart.to_chart(pts[inside])
        back = chart.from_chart(xi)
        if man is S2:
            err = np.linalg.norm(back - pts[inside], axis=1)  # arccos is ill-conditioned at 0
        else:
            err = np.linalg.norm(torus_geom.wrap_diff(back, pts[inside]), axis=1)
        assert np.max(err, initial=0.0) < 1e-10


@pytest.mark.parametrize("man", [S2, T2])
def test_christoffel_matches_metric_differences(man):
    # Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij) with FD metric derivatives
    atlas = default_atlas(man)
    chart = atlas.charts[0]
    rng = rng_stream(2, "chris")
    xi = rng.uniform(-0.4, 0.4, size=(50, 2))
    G = chart.christoffel_at(xi)
    np.testing.assert_array_equal(G, np.transpose(G, (0, 1, 3, 2)))  # symmetry, exact
    h = 1e-6
    dg = np.empty((50, 2, 2, 2))  # dg[:, l, i, j] = d_l g_ij
    for l in range(2):
        e = np.zeros(2); e[l] = h
        dg[:, l] = (chart.metric_at(xi + e) - chart.metric_at(xi - e)) / (2 * h)
    rhs = np.empty_like(dg)  # rhs[:, i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    for i in range(2):
        for j in range(2):
            for l in range(2):
                rhs[:, i, j, l] = dg[:, i, j, l] + dg[:, j, i, l] - dg[:, l, i, j]
    ginv = np.linalg.inv(chart.metric_at(xi))
    ref = 0.5 * np.einsum("bkl,bijl->bkij", ginv, rhs)
    np.testing.assert_allclose(G, ref, atol=1e-5)


@pytest.mark.parametrize("man", [S2, T2])
def test_partition_of_unity(man):
    atlas = default_atlas(man)
    pts = sample_uniform_batch(man, 2000, 4)
    psi = atlas.partition(pts)
    np.testing.assert_allclose(psi.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(psi >= 0.0)
    # support condition: positive weight implies inside the bump radius
    for a, chart in enumerate(atlas.charts):
        pos = psi[:, a] > 0
        assert np.all(chart.center_dist(pts[pos]) < chart.bump_radius)


def test_partition_weight_one_at_isolated_center():
    # the north-pole chart center lies outside every other bump on the sphere
    atlas = default_atlas(S2)
    w = dict(partition_weights(ManifoldPoint(S2, [0, 0, 1])))
    north = [c.id for c in atlas.charts if c.center_coords[2] > 0.9][0]
    assert w[north] == pytest.approx(1.0, abs=1e-15)
    assert len(w) == 1


def test_certify_torus_single_pair():
    rep = certify_atlas(default_atlas(T2), 1, 0)
    assert rep.passed
    assert rep.empirical_lambda == pytest.approx(1.0, abs=1e-12)


def test_certify_sphere_default_lambda():
    rep = certify_atlas(default_atlas(S2), 2000, 1)
    assert rep.passed
    assert rep.empirical_lambda >= 0.5


def test_certify_sphere_overtight_lambda_fails_with_witnesses():
    rep = certify_atlas(default_atlas(S2), 2000, 1, declared_lambda=0.999)
    assert not rep.passed
    assert rep.metric_violations > 0


# --- chart shooting --------------------------------------------------------------

def test_chart_shooting_matches_closed_form():
    for man, seed in ((S2, 31), (T2, 32)):
        atlas = default_atlas(man)
        x, y = sample_pairs_within(man, 200, atlas.rho, seed)
        got = shooting_distance_batch(atlas, x, y)
        geom = sphere_geom if man is S2 else __import__(
            "manistoch.geometry.torus", fromlist=["torus"])
        np.testing.assert_allclose(got, geom.dist(x, y), atol=1e-6)


def test_chart_shooting_scalar_requires_common_chart():
    with pytest.raises(UsageError):
        chart_shooting_distance(sp(0, 0, 1), sp(0, 0, -1))


# --- sampling --------------------------------------------------------------------

def test_sample_uniform_deterministic():
    a = sample_uniform_batch(S2, 5, 123)
    b = sample_uniform_batch(S2, 5, 123)
    np.testing.assert_array_equal(a, b)


def test_sample_uniform_sphere_mean_clt():
    n = 100_000
    pts = sample_uniform_batch(S2, n, 77)
    se = np.sqrt(1.0 / (3 * n))  # per-coordinate variance is 1/3
    assert np.all(np.abs(pts.mean(axis=0)) < 3 * se)


def test_sample_uniform_torus_quadrant_frequency():
    n = 100_000
    pts = sample_uniform_batch(T2, n, 78)
    frac = np.mean(pts[:, 0] < np.pi)
    se = np.sqrt(0.25 / n)
    assert abs(frac - 0.5) < 3 * se


def test_point_normalization_invariants():
    p = ManifoldPoint(S2, [1.0 + 1e-9, 0, 0])
    assert abs(np.linalg.norm(p.coords) - 1.0) < 1e-12
    q = ManifoldPoint(T2, [2 * np.pi + 0.5, -0.25])
    assert np.all((q.coords >= 0) & (q.coords < 2 * np.pi))


@settings(max_examples=50, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_torus_wrap_property(a, b):
    q = ManifoldPoint(T2, [a, b])
    assert np.all((q.coords >= 0) & (q.coords < 2 * np.pi))
