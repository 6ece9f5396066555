"""Experiment-layer tests at reduced scale (the acceptance suite runs full size)."""
import numpy as np
import pytest

from manistoch.experiments import (default_config, exp_distance_estimates,
                                   exp_pushforward_constant, exp_quasi_invariance,
                                   exp_stability, exp_wong_zakai)
from manistoch.experiments.stability import _s_of_delta, _sup_sq_distances
from manistoch.fields import make_noise, mollify, rough_sphere_drift, zero_field
from manistoch.geometry import Manifold


def test_stability_s_delta_monotone_and_vanishing():
    # log(u/delta^2 + 1) decreases pointwise in delta and vanishes as delta -> inf
    sup_sq = np.abs(np.random.default_rng(0).normal(size=(8, 16))) ** 2
    deltas = np.array([0.01, 0.1, 1.0, 10.0, 1e6])
    S, _ = _s_of_delta(sup_sq, deltas)
    assert np.all(np.diff(S) < 0)
    assert S[-1] < 1e-9


def test_stability_small_run_passes():
    cfg = default_config("stability").with_updates(
        n_paths=6, n_points=24, dt=2e-2, seed=5,
        params={"delta_grid": [0.03, 0.1, 0.3, 1.0], "mollify_levels": [8, 16],
                "norm_samples": 4000, "quad_nodes": 8})
    rep = exp_stability(cfg)
    assert rep.verdicts["s_monotone_in_delta"].passed
    assert rep.verdicts["identical_drift_control"].passed


def test_coupled_distance_shrinks_with_mollification_level():
    # finer mollification tracks the rough flow more closely, path by path
    cfg = default_config("stability").with_updates(
        n_paths=10, n_points=12, dt=2e-2, seed=3)
    drift = rough_sphere_drift(0.6)
    noise = make_noise(Manifold.SPHERE2, "killing")
    med = {}
    for n in (4, 16, 64):
        sup = _sup_sq_distances(cfg, drift, mollify(drift, n, quad_points=8), noise)
        med[n] = float(np.median(sup))
    assert med[64] < med[16] < med[4]


def test_quasi_invariance_deterministic_reports():
    cfg = default_config("quasi-invariance").with_updates(
        n_paths=20, n_points=50, seed=11, params={"chunk_paths": 7})
    a = exp_quasi_invariance(cfg).as_dict()
    b = exp_quasi_invariance(cfg).as_dict()
    assert a == b


def test_quasi_invariance_small_smooth_config():
    cfg = default_config("quasi-invariance").with_updates(
        n_paths=60, n_points=200, seed=2, params={"chunk_paths": 30})
    rep = exp_quasi_invariance(cfg)
    assert rep.metrics["max_z"]["value"] < 6.0  # loose at this sample size


def test_wong_zakai_requires_divisible_levels():
    cfg = default_config("wz-conv").with_updates(
        n_paths=4, params={"level_grid": [7]})
    with pytest.raises(ValueError):
        exp_wong_zakai(cfg)


def test_distance_estimates_zero_field_left_side():
    # X = 0 makes the first-order left side vanish identically
    from manistoch.experiments.distest import _first_order_ratios
    cfg = default_config("distance-est").with_updates(seed=4)
    ratios, *_ = _first_order_ratios(cfg, zero_field(Manifold.SPHERE2),
                                     500, 20_000, ("z",))
    np.testing.assert_array_equal(ratios, 0.0)


def test_pushforward_measure_preserving_near_one():
    cfg = default_config("pushforward").with_updates(
        drift="zero", noise="killing", n_paths=60, n_points=150, dt=2e-2, seed=9)
    rep = exp_pushforward_constant(cfg)
    assert rep.verdicts["constant_function_ratio_one"].passed
    # K_T is a sup over noisy ratio estimates, so it sits above 1 by a few
    # standard errors at this sample size
    assert abs(rep.metrics["K_T"]["value"] - 1.0) < 0.35


def test_report_round_trip_serialization():
    cfg = default_config("stability").with_updates(
        n_paths=4, n_points=8, dt=5e-2, seed=1,
        params={"delta_grid": [0.1, 0.3], "mollify_levels": [8],
                "norm_samples": 2000, "quad_nodes": 8})
    rep = exp_stability(cfg)
    import json
    blob = json.dumps(rep.as_dict(), sort_keys=True)
    doc = json.loads(blob)
    assert doc["experiment"] == "stability"
    assert set(doc["verdicts"]) == set(rep.verdicts)
