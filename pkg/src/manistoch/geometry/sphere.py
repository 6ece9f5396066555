"""Closed-form geometry of the unit round sphere S^2, vectorized over batches.

All functions take and return ndarrays whose last axis holds ambient
coordinates; points are assumed unit vectors.
"""
import numpy as np


def dist(x, y):
    """Great-circle distance arccos(<x,y>)."""
    return np.arccos(np.clip(np.sum(x * y, axis=-1), -1.0, 1.0))


def log_map(x, y):
    """Tangent vector v at x with exp_x(v) = y; |v| = dist(x, y).

    Undefined at the antipode; callers guard the cut locus.
    """
    d = dist(x, y)
    perp = y - np.sum(x * y, axis=-1, keepdims=True) * x
    nrm = np.linalg.norm(perp, axis=-1, keepdims=True)
    safe = np.where(nrm > 1e-15, nrm, 1.0)
    unit = np.where(nrm > 1e-15, perp / safe, 0.0)
    return unit * d[..., None]


def exp_map(x, v):
    """Geodesic exponential: walk from x along tangent v."""
    nv = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(nv > 1e-15, nv, 1.0)  # for |v| ~ 0 the sin factor kills v/safe anyway
    out = np.cos(nv) * x + np.sin(nv) * (v / safe)
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def geodesic_points(x, y, s):
    """Points gamma(s * dist) on the minimizing geodesic x -> y, s in [0,1].

    x, y: (..., 3); s: (K,). Returns (..., K, 3).
    """
    v = log_map(x, y)
    return exp_map(x[..., None, :], v[..., None, :] * np.asarray(s)[:, None])


def transport_oracle(x, y, v):
    """Parallel transport along the minimizing geodesic, as a Rodrigues rotation.

    Rotates v about the axis x cross y by the angle dist(x, y); the closed-form
    reference for the chart-ODE transport.
    """
    d = dist(x, y)
    axis = np.cross(x, y)
    nrm = np.linalg.norm(axis, axis=-1, keepdims=True)
    small = nrm[..., 0] < 1e-15
    k = axis / np.where(nrm > 1e-15, nrm, 1.0)
    cos_d = np.cos(d)[..., None]
    sin_d = np.sin(d)[..., None]
    out = (v * cos_d + np.cross(k, v) * sin_d
           + k * np.sum(k * v, axis=-1, keepdims=True) * (1.0 - cos_d))
    if np.any(small):
        out = np.where(small[..., None], v, out)
    return out


def grad_dist(x, y):
    """Gradient at x of dist(., y): the unit tangent at x pointing away from y."""
    d = dist(x, y)[..., None]
    v = log_map(x, y)
    safe = np.where(d > 1e-15, d, 1.0)
    return np.where(d > 1e-15, -v / safe, 0.0)


def sample_uniform(n, rng):
    """n i.i.d. uniform points via normalized Gaussians."""
    x = rng.standard_normal((n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def tangent_basis(x):
    """An orthonormal tangent basis (e1, e2) at each point, deterministic in x."""
    x = np.atleast_2d(x)
    ref = np.where(np.abs(x[:, 2:3]) < 0.9, np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    e1 = np.cross(ref, x)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(x, e1)
    return e1, e2
