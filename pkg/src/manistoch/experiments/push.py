"""Pushforward constant: K_T = sup_f sup_t E int f(x_t) dnu / int f dnu."""
from __future__ import annotations

import numpy as np

from ..geometry import sphere, torus
from ..geometry.base import Manifold
from ..geometry.sampling import sample_uniform_batch
from ..flow.integrator import BatchFlow
from .config import ExperimentConfig
from .core import path_increments
from .report import ExperimentReport


def bump_dictionary(manifold: Manifold):
    geom = sphere if manifold is Manifold.SPHERE2 else torus
    if manifold is Manifold.SPHERE2:
        centers = [np.array(c, dtype=float) for c in
                   [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]]
    else:
        centers = [np.array(c, dtype=float) for c in
                   [(0, 0), (np.pi, 0), (0, np.pi), (np.pi, np.pi), (1.5, 4.5), (4.5, 1.5)]]
    radii = [0.5, 0.8, 0.5, 0.8, 0.6, 0.7]

    def bump(center, r):
        def f(pts):
            d = geom.dist(pts, center) / r
            out = np.zeros(len(pts))
            m = d < 1.0
            out[m] = np.exp(-1.0 / (1.0 - d[m] ** 2))
            return out
        return f

    return [("bump%d" % i, bump(c, r)) for i, (c, r) in enumerate(zip(centers, radii))]


def _ratios(cfg, funcs, n_paths, ref_n=200_000):
    man = cfg.manifold_enum
    drift = cfg.make_drift()
    noise = cfg.make_noise()
    m = max(1, len(noise))
    pts = sample_uniform_batch(man, cfg.n_points, cfg.seed, stream=("push_pts",))
    x0 = np.tile(pts, (n_paths, 1))
    incs = path_increments(m, cfg.T, cfg.n_steps, cfg.seed, range(n_paths))
    flow = BatchFlow(drift, noise, x0, cfg.dt, scheme=cfg.scheme,
                     substeps=cfg.substeps, track_density=False)
    t_checks = int(cfg.params.get("t_checks", 8))
    check_every = max(1, cfg.n_steps // t_checks)

    ref = sample_uniform_batch(man, ref_n, cfg.seed, stream=("push_ref",))
    denom = {name: float(np.mean(f(ref))) for name, f in funcs}
    sup_ratio = {name: (1.0 if name == "one" else 0.0) for name, _ in funcs}
    for k in range(cfg.n_steps):
        flow.step(np.repeat(incs[k], cfg.n_points, axis=0))
        if (k + 1) % check_every == 0 or k == cfg.n_steps - 1:
            for name, f in funcs:
                num = float(np.mean(f(flow.x)))
                sup_ratio[name] = max(sup_ratio[name], num / denom[name])
    return sup_ratio


def exp_pushforward_constant(cfg: ExperimentConfig) -> ExperimentReport:
    cfg.require_valid()
    rep = ExperimentReport("pushforward", cfg.as_dict(), cfg.seed)
    funcs = [("one", lambda pts: np.ones(len(pts)))] + bump_dictionary(cfg.manifold_enum)

    full = _ratios(cfg, funcs, cfg.n_paths)
    half = _ratios(cfg, funcs, max(2, cfg.n_paths // 2))
    K_T = max(full.values())
    K_T_half = max(half.values())
    rep.add_table("ratios", ["f", "sup_ratio"], [[k, v] for k, v in full.items()])
    rep.add_metric("K_T", float(K_T))
    rep.add_metric("K_T_half_paths", float(K_T_half))
    rep.add_verdict("constant_function_ratio_one",
                    full["one"] == 1.0,
                    "f == 1 gives pushforward ratio exactly 1",
                    observed=full["one"], tolerance=0.0)
    rep.add_verdict("K_T_finite_stable",
                    bool(np.isfinite(K_T) and abs(K_T - K_T_half) / K_T < 0.2),
                    "K_T finite and stable within 20% under halving the path count",
                    observed=float(abs(K_T - K_T_half) / K_T), tolerance=0.2)
    return rep
