"""Shared Monte-Carlo machinery for the verification experiments."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..flow.driver import brownian_values
from ..flow.integrator import BatchFlow


def path_increments(m, T, n_steps, seed, path_indices):
    """Per-path increment stack, shape (n_steps, P, m)."""
    out = np.empty((n_steps, len(path_indices), m))
    for i, p in enumerate(path_indices):
        out[:, i, :] = np.diff(brownian_values(m, T, n_steps, seed, p), axis=1).T
    return out


def run_tiled(flow: BatchFlow, incs: np.ndarray, n_points: int, watchers=()):
    """Advance a (paths x points) batch with per-path increments shared across points.

    Row layout is path-major: row = path * n_points + point. Watchers are
    callables invoked after every step (used for running suprema).
    """
    n_steps = incs.shape[0]
    for k in range(n_steps):
        w = np.repeat(incs[k], n_points, axis=0)
        flow.step(w)
        for cb in watchers:
            cb(flow)
    return flow


def map_ordered(fn, items, threads: int = 1):
    """Deterministic ordered map, optionally on a thread pool."""
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def chunked(seq, size):
    seq = list(seq)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def linear_fit(x, y):
    """Least-squares line fit; returns slope, intercept, r_squared."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def fit_envelope(deltas, values, scale):
    """Nonnegative least squares for values ~ a + b * scale / delta (2 params)."""
    deltas = np.asarray(deltas, dtype=float)
    A = np.vstack([np.ones_like(deltas), scale / deltas]).T
    coef, *_ = np.linalg.lstsq(A, np.asarray(values, dtype=float), rcond=None)
    a, b = float(coef[0]), float(coef[1])
    # clip to the admissible quadrant and refit the free parameter
    if b < 0:
        b = 0.0
        a = float(np.mean(values))
    if a < 0:
        a = 0.0
        b = float(np.sum(values * (scale / deltas)) / np.sum((scale / deltas) ** 2))
    return a, b
