"""The key stability functional: S(delta) = E int log(sup_t dis^2 / delta^2 + 1) dnu
for a rough drift against its mollification, under common noise."""
from __future__ import annotations

import numpy as np

from ..fields import l1_norm, mollify
from ..flow.integrator import BatchFlow
from ..geometry.sampling import sample_uniform_batch
from ..util import batch_mean_se
from .config import ExperimentConfig
from .core import fit_envelope, path_increments
from .report import ExperimentReport


def _sup_sq_distances(cfg, drift_a, drift_b, noise):
    """sup_t dis^2(x_t, x_hat_t) per (path, point) row under common noise."""
    man = cfg.manifold_enum
    m = max(1, len(noise))
    pts = sample_uniform_batch(man, cfg.n_points, cfg.seed, stream=("stab_pts",))
    x0 = np.tile(pts, (cfg.n_paths, 1))
    incs = path_increments(m, cfg.T, cfg.n_steps, cfg.seed, range(cfg.n_paths))
    fa = BatchFlow(drift_a, noise, x0, cfg.dt, scheme=cfg.scheme,
                   substeps=cfg.substeps, track_density=False)
    fb = BatchFlow(drift_b, noise, x0, cfg.dt, scheme=cfg.scheme,
                   substeps=cfg.substeps, track_density=False)
    sup = np.zeros(x0.shape[0])

    for k in range(cfg.n_steps):
        w = np.repeat(incs[k], cfg.n_points, axis=0)
        fa.step(w)
        fb.step(w)
        np.maximum(sup, fa.distances_to(fb) ** 2, out=sup)
    return sup.reshape(cfg.n_paths, cfg.n_points)


def _s_of_delta(sup_sq, deltas):
    """Mean and per-point-batched SE of log(sup^2/delta^2 + 1) per delta."""
    means, ses = [], []
    for d in deltas:
        vals = np.log(sup_sq / d ** 2 + 1.0)
        per_point = vals.mean(axis=0)          # average over paths first
        mval, se = batch_mean_se(per_point)
        means.append(float(mval))
        ses.append(float(se))
    return np.array(means), np.array(ses)


def exp_stability(cfg: ExperimentConfig) -> ExperimentReport:
    cfg.require_valid()
    deltas = np.asarray(cfg.params.get("delta_grid", [0.01, 0.03, 0.1, 0.3]), dtype=float)
    levels = list(cfg.params.get("mollify_levels", [8, 16]))
    norm_n = int(cfg.params.get("norm_samples", 20_000))
    rep = ExperimentReport("stability", cfg.as_dict(), cfg.seed)
    drift = cfg.make_drift()
    noise = cfg.make_noise()

    quad = int(cfg.params.get("quad_nodes", 8))
    fitted = {}
    rows = []
    envelope_ok = True
    monotone_ok = True
    for n in levels:
        hat = mollify(drift, n, quad_points=quad)
        l1 = l1_norm(drift, hat, quadrature_n=norm_n, rng_seed=cfg.seed)
        sup_sq = _sup_sq_distances(cfg, drift, hat, noise)
        S, se = _s_of_delta(sup_sq, deltas)
        monotone_ok &= bool(np.all(np.diff(S) < 0.0))
        a, b = fit_envelope(deltas, S, l1)
        envelope = a + b * l1 / deltas
        envelope_ok &= bool(np.all(S <= envelope + 2.0 * se))
        fitted[n] = (a, b, l1)
        for d, s, e in zip(deltas, S, se):
            rows.append([n, d, s, e, a + b * l1 / d, l1])
        rep.add_metric("envelope_a_n%d" % n, a)
        rep.add_metric("envelope_b_n%d" % n, b)
        rep.add_metric("l1_distance_n%d" % n, l1)

    rep.add_table("s_of_delta", ["level", "delta", "S", "se", "envelope", "l1"], rows)

    # identical-drift control: coupled flows coincide bit for bit
    ctrl = cfg.with_updates(n_paths=min(cfg.n_paths, 8), n_points=min(cfg.n_points, 16))
    sup_ctrl = _sup_sq_distances(ctrl, drift, drift, noise)
    control_zero = bool(np.all(sup_ctrl == 0.0))
    rep.add_metric("control_max_sup_sq", float(sup_ctrl.max()))

    bs = [fitted[n][1] for n in levels]
    b_spread = float(max(bs) / max(min(bs), 1e-12)) if min(bs) > 0 else np.inf

    rep.add_metric("b_spread_across_levels", b_spread)
    rep.add_verdict("s_monotone_in_delta", monotone_ok,
                    "S(delta) strictly decreasing along the delta grid (pointwise exact)")
    rep.add_verdict("envelope_dominates", envelope_ok,
                    "S(delta) <= a + b ||X0 - X0_n||_1 / delta within 2 SE at every grid point")
    rep.add_verdict("identical_drift_control", control_zero,
                    "identical drifts give sup dis^2 = 0 exactly",
                    observed=float(sup_ctrl.max()), tolerance=0.0)
    return rep
