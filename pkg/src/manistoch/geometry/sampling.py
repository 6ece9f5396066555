"""Monte-Carlo sampling from the normalized Riemannian volume."""
import numpy as np

from ..util import rng_stream
from . import sphere, torus
from .base import Manifold, ManifoldPoint


def sample_uniform_batch(manifold: Manifold, n: int, rng_seed, stream=("nu",)) -> np.ndarray:
    """n i.i.d. nu-uniform points as an (n, dim) array, deterministic in the seed."""
    rng = rng_stream(rng_seed, *stream)
    if manifold is Manifold.SPHERE2:
        return sphere.sample_uniform(n, rng)
    return torus.sample_uniform(n, rng)


def sample_uniform(manifold: Manifold, n: int, rng_seed):
    """Spec-facing variant returning ManifoldPoint values."""
    pts = sample_uniform_batch(manifold, n, rng_seed)
    return [ManifoldPoint(manifold, p) for p in pts]


def sample_pairs_within(manifold: Manifold, n: int, radius: float, rng_seed,
                        stream=("pairs",)):
    """Pairs (x, y) with dist(x, y) < radius, full support in the ball.

    x is nu-uniform; y = exp_x(r * t) with a uniform tangent direction t and
    r = radius * sqrt(U) (area-weighted in the flat approximation).
    """
    rng = rng_stream(rng_seed, *stream)
    geom = sphere if manifold is Manifold.SPHERE2 else torus
    if manifold is Manifold.SPHERE2:
        x = sphere.sample_uniform(n, rng)
        e1, e2 = sphere.tangent_basis(x)
        ang = rng.uniform(0.0, 2.0 * np.pi, size=n)
        t = np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2
    else:
        x = torus.sample_uniform(n, rng)
        ang = rng.uniform(0.0, 2.0 * np.pi, size=n)
        t = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    # keep radii strictly inside the ball
    r = np.minimum(r, radius * (1.0 - 1e-12))
    y = geom.exp_map(x, r[:, None] * t)
    return x, y
