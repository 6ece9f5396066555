"""First- and second-order distance estimates along vector fields."""
from __future__ import annotations

import numpy as np

from ..geometry import sphere, torus
from ..geometry.atlas import default_atlas
from ..geometry.base import Manifold
from ..geometry.sampling import sample_pairs_within, sample_uniform_batch
from ..maximal import ScalarFieldSamples, maximal_function_batch
from .config import ExperimentConfig
from .report import ExperimentReport


def _first_order_ratios(cfg, field, n_pairs, cloud_n, seed_stream):
    """|X(x)dis^2(.,y) + X(y)dis^2(x,.)| over dis^2 (1 + M|X|_1(x) + M|X|_1(y))."""
    man = cfg.manifold_enum
    atlas = default_atlas(man)
    geom = sphere if man is Manifold.SPHERE2 else torus
    x, y = sample_pairs_within(man, n_pairs, atlas.lam ** 2 * atlas.rho,
                               cfg.seed, stream=seed_stream)
    d = geom.dist(x, y)
    keep = d > 1e-6
    x, y, d = x[keep], y[keep], d[keep]

    # directional derivatives of dis^2 through the closed-form gradients
    gx = -2.0 * geom.log_map(x, y)   # grad_x dis^2(., y)
    gy = -2.0 * geom.log_map(y, x)
    lhs = np.abs(np.sum(field.eval_ambient(x) * gx, axis=1)
                 + np.sum(field.eval_ambient(y) * gy, axis=1))

    def x1(pts):
        vals = field.first_order_norm_batch(pts, skip_singular=True)
        return np.nan_to_num(vals, nan=0.0, posinf=0.0)

    cloud = ScalarFieldSamples.from_function(man, x1, cloud_n, cfg.seed,
                                             stream=seed_stream + ("cloud",))
    mx = maximal_function_batch(cloud, x, atlas.rho)
    my = maximal_function_batch(cloud, y, atlas.rho)
    maj = d ** 2 * (1.0 + mx + my)
    return lhs / maj, x, y, d


def _second_order_ratios(cfg, field, n_pairs):
    """|sum_ab (X^2 dis^2)_ab| / dis^2 via the diagonal-flow second difference."""
    man = cfg.manifold_enum
    atlas = default_atlas(man)
    geom = sphere if man is Manifold.SPHERE2 else torus
    x, y = sample_pairs_within(man, n_pairs, atlas.rho, cfg.seed, stream=("dist2",))
    d = geom.dist(x, y)
    keep = d > 1e-3
    x, y, d = x[keep], y[keep], d[keep]

    h = 1e-3

    def flow_step(pts, sign):
        # one RK4 step of size sign*h along the field
        def vel(p):
            return field.eval_ambient(p)
        k1 = vel(pts)
        k2 = vel(geom.exp_map(pts, 0.5 * sign * h * k1))
        k3 = vel(geom.exp_map(pts, 0.5 * sign * h * k2))
        k4 = vel(geom.exp_map(pts, sign * h * k3))
        return geom.exp_map(pts, (sign * h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))

    psi0 = d ** 2
    psi_p = geom.dist(flow_step(x, +1), flow_step(y, +1)) ** 2
    psi_m = geom.dist(flow_step(x, -1), flow_step(y, -1)) ** 2
    second = (psi_p - 2.0 * psi0 + psi_m) / h ** 2
    return np.abs(second) / psi0


def exp_distance_estimates(cfg: ExperimentConfig) -> ExperimentReport:
    cfg.require_valid()
    n_pairs = int(cfg.params.get("n_pairs", 4000))
    cloud_n = int(cfg.params.get("cloud", 100_000))
    rep = ExperimentReport("distance_estimates", cfg.as_dict(), cfg.seed)
    man = cfg.manifold_enum

    # first order, configured (rough) field: finite and refinement-stable
    field = cfg.make_drift()
    r1, *_ = _first_order_ratios(cfg, field, n_pairs, cloud_n, ("dist1",))
    r2, *_ = _first_order_ratios(cfg, field, 2 * n_pairs, 2 * cloud_n, ("dist1b",))
    p1, p2 = np.percentile(r1, 99.9), np.percentile(r2, 99.9)
    rep.add_metric("first_order_p999", float(p1))
    rep.add_metric("first_order_p999_refined", float(p2))
    rep.add_verdict("first_order_finite_stable",
                    bool(np.isfinite(p1) and np.isfinite(p2)
                         and abs(p1 - p2) / max(p2, 1e-12) < 0.5),
                    "99.9th-percentile first-order constant finite and stable "
                    "within 50% under doubling", observed=float(abs(p1 - p2) / p2))

    # first order, Killing field: the isometry generator kills the left side,
    # so the ratio sits far below the closed-form majorant 2 sup|X|_1 + 1
    if man is Manifold.SPHERE2:
        from ..fields import killing_field
        kf = killing_field(2)
        rk, x, y, d = _first_order_ratios(cfg, kf, n_pairs, cloud_n, ("distk",))
        grid = sample_uniform_batch(man, 20_000, cfg.seed, stream=("supgrid",))
        sup_x1 = float(np.max(kf.first_order_norm_batch(grid)))
        # compare |LHS| / dis^2 against the sup-norm majorant directly
        geom = sphere
        gx = -2.0 * geom.log_map(x, y)
        gy = -2.0 * geom.log_map(y, x)
        lhs = np.abs(np.sum(kf.eval_ambient(x) * gx, axis=1)
                     + np.sum(kf.eval_ambient(y) * gy, axis=1))
        ratio_sup = np.percentile(lhs / d ** 2, 99.9)
        rep.add_metric("killing_ratio_p999", float(ratio_sup))
        rep.add_metric("killing_majorant", 2.0 * sup_x1 + 1.0)
        rep.add_verdict("killing_within_majorant",
                        bool(ratio_sup <= 2.0 * sup_x1 + 1.0),
                        "Killing-field first-order ratio below 2 sup|X|_1 + 1",
                        observed=float(ratio_sup), tolerance=2.0 * sup_x1 + 1.0)

    # second order along a smooth C^2 field
    from ..fields import grad_height_field, constant_field
    smooth = grad_height_field() if man is Manifold.SPHERE2 else constant_field((1.0, 0.3))
    s1 = _second_order_ratios(cfg, smooth, n_pairs)
    s2 = _second_order_ratios(cfg, smooth, 2 * n_pairs)
    q1, q2 = np.percentile(s1, 99.9), np.percentile(s2, 99.9)
    rep.add_metric("second_order_p999", float(q1))
    rep.add_verdict("second_order_finite_stable",
                    bool(np.isfinite(q1) and abs(q1 - q2) / max(q2, 1e-12) < 0.5),
                    "99.9th-percentile second-order constant finite and stable "
                    "within 50% under doubling", observed=float(abs(q1 - q2) / max(q2, 1e-12)))
    rep.add_table("ratios", ["kind", "p50", "p99", "p999"],
                  [["first_order", float(np.percentile(r1, 50)),
                    float(np.percentile(r1, 99)), float(p1)],
                   ["second_order", float(np.percentile(s1, 50)),
                    float(np.percentile(s1, 99)), float(q1)]])
    return rep
