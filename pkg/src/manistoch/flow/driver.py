"""Brownian drivers: counter-keyed, bridge-consistent, with Wong-Zakai views.

Paths are built hierarchically: increments at the odd base resolution first,
then dyadic midpoint refinement with fresh bridge noise. A driver with 2N
steps therefore shares every coarse value with the N-step driver for the same
(seed, path_index), and coarse increments equal pairwise sums of fine ones up
to a couple of ulps of floating-point rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError
from ..util import rng_stream


def _base_and_levels(n_steps: int):
    n0, levels = n_steps, 0
    while n0 % 2 == 0:
        n0 //= 2
        levels += 1
    return n0, levels


def brownian_values(m: int, T: float, n_steps: int, seed, path_index: int) -> np.ndarray:
    """Brownian path values at the uniform grid, shape (m, n_steps + 1).

    The variate order is fixed (base increments, then per-level midpoints), so
    every (seed, path_index) pair defines one path consistently across all
    dyadic refinements of the same odd base.
    """
    if n_steps == 0 and T == 0:
        return np.zeros((m, 1))  # degenerate horizon: a single initial value
    if n_steps < 1 or T <= 0:
        raise UsageError("need n_steps >= 1 and T > 0")
    n0, levels = _base_and_levels(n_steps)
    rng = rng_stream(seed, "bm", path_index)
    dt0 = T / n0
    base = rng.standard_normal((m, n0)) * np.sqrt(dt0)
    W = np.concatenate([np.zeros((m, 1)), np.cumsum(base, axis=1)], axis=1)
    h = dt0
    for _ in range(levels):
        mid = 0.5 * (W[:, :-1] + W[:, 1:]) + rng.standard_normal(W[:, :-1].shape) * np.sqrt(h / 4.0)
        out = np.empty((m, 2 * (W.shape[1] - 1) + 1))
        out[:, 0::2] = W
        out[:, 1::2] = mid
        W = out
        h /= 2.0
    return W


@dataclass
class BrownianDriver:
    """One m-channel Brownian path on a uniform grid over [0, T]."""

    m: int
    T: float
    n_steps: int
    seed: int
    path_index: int = 0
    wz_level: int | None = None
    values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.values is None:
            self.values = brownian_values(self.m, self.T, self.n_steps,
                                          self.seed, self.path_index)

    @property
    def dt(self) -> float:
        return self.T / self.n_steps if self.n_steps else 0.0

    @property
    def increments(self) -> np.ndarray:
        """Increment array, shape (m, n_steps)."""
        return np.diff(self.values, axis=1)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_steps + 1)

    def wz_values(self, level: int | None = None) -> np.ndarray:
        """Subsampled values on the Wong-Zakai interpolation grid (m, level+1)."""
        level = self.wz_level if level is None else level
        if level is None:
            raise UsageError("driver has no wz_level set")
        if self.n_steps % level != 0:
            raise UsageError("wz level %d must divide n_steps %d" % (level, self.n_steps))
        return self.values[:, ::self.n_steps // level]

    def reversed_driver(self) -> "BrownianDriver":
        """The discrete realization of W^T_t = W_{T-t} - W_T.

        Its increments are the forward increments reversed in order and negated.
        """
        vals = self.values[:, ::-1] - self.values[:, -1:]
        return BrownianDriver(self.m, self.T, self.n_steps, self.seed,
                              self.path_index, self.wz_level, values=vals)


def make_driver(m: int, T: float, n_steps: int, seed, path_index: int = 0,
                wz_level: int | None = None) -> BrownianDriver:
    return BrownianDriver(m, T, n_steps, seed, path_index, wz_level)


def increments_batch(m: int, T: float, n_steps: int, seed, path_indices) -> np.ndarray:
    """Increments for many paths at once, shape (n_steps, n_paths, m)."""
    out = np.empty((n_steps, len(path_indices), m))
    for i, p in enumerate(path_indices):
        W = brownian_values(m, T, n_steps, seed, p)
        out[:, i, :] = np.diff(W, axis=1).T
    return out
