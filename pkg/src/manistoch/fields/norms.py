"""Monte-Carlo Sobolev norms and sup-norm estimates for vector fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from ..geometry.sampling import sample_uniform_batch
from .base import VectorField, difference


@dataclass
class SobolevNormReport:
    p: float
    l_p_norm: float
    w1p_norm: float
    sup_norm: float
    div_neg_sup: float
    n_samples: int
    n_skipped_singular: int
    l_p_se: float
    grad_p_se: float

    def as_dict(self):
        return dict(self.__dict__)


def sobolev_norms(field: VectorField, p: float, quadrature_n: int = 100_000,
                  rng_seed=0, stream=("sobolev",)) -> SobolevNormReport:
    """Norms against the raw Riemannian volume (not normalized to mass one).

    ||X||_p^p = vol(M) * E|X|^p over nu-uniform samples; singular-set hits of
    the derivative are skipped and counted (they form a nu-null set for the
    built-in rough family).
    """
    if p < 1:
        raise UsageError("p must be >= 1")
    pts = sample_uniform_batch(field.manifold, quadrature_n, rng_seed, stream=stream)
    vol = field.manifold.volume

    vals = np.linalg.norm(field.eval_ambient(pts), axis=-1)
    sing = field.singular_mask(pts)
    grads = field.cov_deriv_norm_batch(pts, skip_singular=True)
    keep = ~sing & np.isfinite(grads)

    lp_p, lp_se = _power_mean(vals ** p)
    gp_p, gp_se = _power_mean(grads[keep] ** p)
    lp = (vol * lp_p) ** (1.0 / p)
    gp = (vol * gp_p) ** (1.0 / p)

    div = field.divergence_batch(pts, skip_singular=True)
    div_ok = div[np.isfinite(div)]
    return SobolevNormReport(
        p=p,
        l_p_norm=float(lp),
        w1p_norm=float(lp + gp),
        sup_norm=float(vals.max()),
        div_neg_sup=float(np.maximum(-div_ok, 0.0).max(initial=0.0)),
        n_samples=quadrature_n,
        n_skipped_singular=int(quadrature_n - keep.sum()),
        l_p_se=float(vol ** (1.0 / p) * lp_se),
        grad_p_se=float(vol ** (1.0 / p) * gp_se),
    )


def _power_mean(samples):
    """Mean of the p-th powers and a delta-method SE for mean^(1/p) (unitless part)."""
    n = samples.size
    if n == 0:
        return 0.0, 0.0
    m = samples.mean()
    se_m = samples.std(ddof=1) / np.sqrt(n) if n > 1 else np.nan
    return m, se_m


def difference_norm_1p(x_field: VectorField, y_field: VectorField, p: float,
                       quadrature_n: int = 50_000, rng_seed=0) -> SobolevNormReport:
    """||X - Y||_{1,p} with the analytic-vs-quadrature Jacobians combined."""
    return sobolev_norms(difference(x_field, y_field), p, quadrature_n, rng_seed,
                         stream=("diffnorm",))


def l1_norm(x_field: VectorField, y_field: VectorField | None = None,
            quadrature_n: int = 50_000, rng_seed=0) -> float:
    """||X||_1 (or ||X - Y||_1) against the raw volume measure."""
    f = x_field if y_field is None else difference(x_field, y_field)
    pts = sample_uniform_batch(f.manifold, quadrature_n, rng_seed, stream=("l1",))
    vals = np.linalg.norm(f.eval_ambient(pts), axis=-1)
    return float(f.manifold.volume * vals.mean())


def field_bound_estimates(field: VectorField, grid_n: int = 20_000, rng_seed=0) -> dict:
    """Sup-norm style envelope inputs: ||X||_inf, ||div X||_inf, ||X div X||_inf.

    X div X is the derivative of the scalar div X along X, estimated by a
    second-order difference along the field's own flow direction.
    """
    pts = sample_uniform_batch(field.manifold, grid_n, rng_seed, stream=("bounds",))
    sing = field.singular_mask(pts)
    pts = pts[~sing]
    vals = field.eval_ambient(pts)
    div = field.divergence_batch(pts, skip_singular=True)
    ok = np.isfinite(div)

    h = 1e-5
    from ..geometry import sphere, torus
    geom = sphere if field.manifold.name == "SPHERE2" else torus
    stepped_p = geom.exp_map(pts, h * vals)
    stepped_m = geom.exp_map(pts, -h * vals)
    div_p = field.divergence_batch(stepped_p, skip_singular=True)
    div_m = field.divergence_batch(stepped_m, skip_singular=True)
    xdx = (div_p - div_m) / (2.0 * h)
    ok2 = ok & np.isfinite(xdx)

    return {
        "sup_X": float(np.linalg.norm(vals, axis=-1).max(initial=0.0)),
        "sup_div_pos": float(np.maximum(div[ok], 0.0).max(initial=0.0)),
        "sup_div_neg": float(np.maximum(-div[ok], 0.0).max(initial=0.0)),
        "sup_div_sq": float((div[ok] ** 2).max(initial=0.0)),
        "sup_X_div_X": float(np.abs(xdx[ok2]).max(initial=0.0)),
    }
