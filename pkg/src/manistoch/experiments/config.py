"""Experiment configuration: defaults, validation, field construction."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import ConfigError
from ..fields import make_drift, make_noise
from ..geometry.base import Manifold

_MANIFOLDS = {"sphere2": Manifold.SPHERE2, "torus2": Manifold.TORUS2}


@dataclass
class ExperimentConfig:
    manifold: str = "sphere2"
    drift: str = "grad_height"
    drift_params: dict = field(default_factory=dict)
    noise: str = "killing"
    T: float = 1.0
    dt: float = 1e-3
    n_paths: int = 200
    n_points: int = 200
    seed: int = 0
    scheme: str = "rk4"
    substeps: int = 2
    threads: int = 1
    params: dict = field(default_factory=dict)

    # --- derived -------------------------------------------------------------
    @property
    def manifold_enum(self) -> Manifold:
        return _MANIFOLDS[self.manifold]

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.T / self.dt)))

    def make_drift(self):
        return make_drift(self.manifold_enum, self.drift, **self.drift_params)

    def make_noise(self):
        return make_noise(self.manifold_enum, self.noise)

    def with_updates(self, **kw):
        return replace(self, **kw)

    def as_dict(self):
        return {
            "manifold": self.manifold, "drift": self.drift,
            "drift_params": dict(self.drift_params), "noise": self.noise,
            "T": self.T, "dt": self.dt, "n_paths": self.n_paths,
            "n_points": self.n_points, "seed": self.seed, "scheme": self.scheme,
            "substeps": self.substeps, "threads": self.threads,
            "params": dict(self.params),
        }

    # --- validation -----------------------------------------------------------
    def validate(self, check_sobolev: bool = False):
        """Schema and semantic diagnostics; raises ConfigError on hard errors."""
        problems, warnings = [], []
        if self.manifold not in _MANIFOLDS:
            problems.append("manifold must be one of %s" % sorted(_MANIFOLDS))
        if self.T < 0 or self.dt <= 0:
            problems.append("need T >= 0 and dt > 0")
        if self.dt > self.T > 0:
            problems.append("dt = %g exceeds T = %g" % (self.dt, self.T))
        if min(self.n_paths, self.n_points) < 1:
            problems.append("n_paths and n_points must be >= 1")
        if self.scheme not in ("rk4", "heun"):
            problems.append("scheme must be rk4 or heun")
        if self.substeps < 1 or self.threads < 1:
            problems.append("substeps and threads must be >= 1")
        gamma = self.drift_params.get("gamma")
        if gamma is not None and not 0 < gamma < 1:
            problems.append("gamma must be in (0, 1)")
        if check_sobolev and self.drift == "rough":
            g = self.drift_params.get("gamma", 0.6)
            p = self.params.get("p", 1.5)
            if p * (1.0 - g) >= 1.0:
                problems.append(
                    "p(1-gamma) = %.3f >= 1: field not in H^p_1" % (p * (1.0 - g)))
        if self.n_paths * self.n_points > 5_000_000:
            warnings.append("n_paths * n_points = %d exceeds desk scale"
                            % (self.n_paths * self.n_points))
        return problems, warnings

    def require_valid(self, check_sobolev: bool = False):
        problems, _ = self.validate(check_sobolev=check_sobolev)
        if problems:
            raise ConfigError("; ".join(problems))
        return self


# --- per-experiment defaults (desk scale, tuned to the acceptance runtimes) ------

DEFAULTS: dict[str, ExperimentConfig] = {
    "geometry-cert": ExperimentConfig(
        n_paths=1, n_points=10_000, params={"n_pairs": 10_000}),
    "mollify-conv": ExperimentConfig(
        drift="rough", drift_params={"gamma": 0.6}, dt=1e-2, substeps=1,
        n_paths=24, n_points=96,
        params={"p": 1.5, "n_grid": [4, 8, 16, 32, 64], "norm_samples": 20_000,
                "flow_n_grid": [4, 8, 16], "pp1_grid": 4000, "quad_nodes": 8}),
    "maximal": ExperimentConfig(
        n_paths=1, n_points=200,
        params={"p": 1.5, "R": 0.5, "cloud": 200_000, "lip_pairs": 4000}),
    "flow-demo": ExperimentConfig(
        drift="zero", noise="killing", dt=1e-3, T=1.0, n_paths=48, n_points=1,
        params={"iso_pairs": 48}),
    "quasi-invariance": ExperimentConfig(
        drift="grad_height", noise="killing", dt=0.03125, substeps=1, n_paths=2000,
        n_points=2000, params={"chunk_paths": 200}),
    "stability": ExperimentConfig(
        drift="rough", drift_params={"gamma": 0.6}, dt=1e-2, substeps=1,
        n_paths=24, n_points=96,
        params={"delta_grid": [0.01, 0.03, 0.1, 0.3], "mollify_levels": [8, 16],
                "norm_samples": 20_000, "quad_nodes": 8}),
    "wz-conv": ExperimentConfig(
        drift="grad_height", noise="killing", dt=1.0 / 1024, n_paths=200,
        n_points=1, params={"level_grid": [8, 16, 32, 64, 128]}),
    "density-moments": ExperimentConfig(
        drift="grad_height", noise="killing", dt=2e-3, substeps=1, n_paths=600,
        n_points=48,
        params={"q_list": [1, 2, 4], "T_grid": [0.25, 0.5, 1.0],
                "mollify_levels": [4, 16]}),
    "distance-est": ExperimentConfig(
        drift="rough", drift_params={"gamma": 0.6}, n_paths=1, n_points=2000,
        params={"n_pairs": 2000, "cloud": 60_000}),
    "pushforward": ExperimentConfig(
        drift="grad_height", noise="killing", dt=5e-3, n_paths=200, n_points=200,
        params={"t_checks": 8}),
}


def default_config(experiment: str) -> ExperimentConfig:
    if experiment not in DEFAULTS:
        raise ConfigError("unknown experiment %r; choose from %s"
                          % (experiment, sorted(DEFAULTS)))
    return DEFAULTS[experiment]
