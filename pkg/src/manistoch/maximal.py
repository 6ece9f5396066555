"""Local Hardy-Littlewood maximal functions on sample clouds.

Ball averages run over an empirical nu-uniform cloud; the supremum ranges over
a dyadic family of radii anchored at the atlas covering radius rho, so the
radius grids for different cutoffs R nest inside each other and monotonicity
in R holds exactly on every evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSamplesError, UsageError
from .geometry import sphere, torus
from .geometry.atlas import default_atlas
from .geometry.base import Manifold
from .geometry.sampling import sample_pairs_within, sample_uniform_batch

DEFAULT_CLOUD = 200_000


@dataclass
class ScalarFieldSamples:
    """A nonnegative function known through values on a nu-uniform cloud."""

    manifold: Manifold
    points: np.ndarray   # (N, dim)
    values: np.ndarray   # (N,)

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise UsageError("points/values length mismatch")

    @property
    def weight(self) -> float:
        """Equal weights summing to the total volume."""
        return self.manifold.volume / len(self.points)

    @classmethod
    def from_function(cls, manifold, fn, n=DEFAULT_CLOUD, rng_seed=0, stream=("cloud",)):
        pts = sample_uniform_batch(manifold, n, rng_seed, stream=stream)
        return cls(manifold, pts, np.asarray(fn(pts), dtype=float))

    def lp_norm(self, p: float) -> float:
        return float((self.manifold.volume * np.mean(np.abs(self.values) ** p)) ** (1.0 / p))


def radius_grid(manifold: Manifold, R: float, r_grid: int = 16) -> np.ndarray:
    """Dyadic radii rho * 2^(-j/2), j = 0..r_grid-1, restricted to (0, R]."""
    if r_grid < 2:
        raise UsageError("r_grid must be >= 2")
    rho = default_atlas(manifold).rho
    if not 0.0 < R <= rho * (1.0 + 1e-12):
        raise UsageError("need 0 < R <= rho = %g" % rho)
    fam = rho * 2.0 ** (-0.5 * np.arange(r_grid))
    return np.sort(fam[fam <= R * (1.0 + 1e-12)])


def _ball_stats(samples: ScalarFieldSamples, xs: np.ndarray, radii: np.ndarray,
                chunk: int = 64):
    """Counts and value sums of every ball B_r(x); shapes (B, K).

    Membership dis < r is decided through monotone comparison keys (sphere:
    inner products against cos r; torus: squared wrapped offsets), avoiding an
    arccos/sqrt per pair.
    """
    B, K = xs.shape[0], len(radii)
    counts = np.empty((B, K), dtype=np.int64)
    sums = np.empty((B, K))
    vals = samples.values
    if samples.manifold is Manifold.SPHERE2:
        thresholds = np.sort(-np.cos(radii))  # ascending with radius
    else:
        thresholds = radii ** 2
    for lo in range(0, B, chunk):
        hi = min(lo + chunk, B)
        if samples.manifold is Manifold.SPHERE2:
            key = -(xs[lo:hi] @ samples.points.T)
        else:
            diff = torus.wrap_diff(xs[lo:hi, None, :], samples.points[None, :, :])
            key = np.einsum("bnk,bnk->bn", diff, diff)
        ring = np.searchsorted(thresholds, key, side="right")  # key < thr[k] <=> ring <= k
        offs = (np.arange(hi - lo) * (K + 1))[:, None]
        flat = (ring + offs).ravel()
        c_h = np.bincount(flat, minlength=(hi - lo) * (K + 1))
        s_h = np.bincount(flat, weights=np.broadcast_to(vals, key.shape).ravel(),
                          minlength=(hi - lo) * (K + 1))
        c_h = c_h.reshape(hi - lo, K + 1)[:, :K]
        s_h = s_h.reshape(hi - lo, K + 1)[:, :K]
        counts[lo:hi] = np.cumsum(c_h, axis=1)
        sums[lo:hi] = np.cumsum(s_h, axis=1)
    return counts, sums


def maximal_function_batch(samples: ScalarFieldSamples, xs: np.ndarray, R: float,
                           r_grid: int = 16) -> np.ndarray:
    """sup over the radius grid of empirical ball averages, at each row of xs.

    Balls containing no cloud sample are skipped; a point whose every ball is
    empty raises InsufficientSamplesError.
    """
    if np.any(samples.values < 0):
        raise UsageError("maximal function expects a nonnegative function")
    radii = radius_grid(samples.manifold, R, r_grid)
    counts, sums = _ball_stats(samples, np.atleast_2d(xs), radii)
    if np.any(counts[:, -1] == 0):
        raise InsufficientSamplesError(
            "all balls empty at %d evaluation point(s); cloud too sparse"
            % int(np.sum(counts[:, -1] == 0)))
    with np.errstate(invalid="ignore", divide="ignore"):
        avgs = np.where(counts > 0, sums / counts, -np.inf)
    return avgs.max(axis=1)


def maximal_function(samples: ScalarFieldSamples, x, R: float, r_grid: int = 16) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return float(maximal_function_batch(samples, x[None, :], R, r_grid)[0])
    return maximal_function_batch(samples, x, R, r_grid)


# --- L^p bound (maximal inequality) -------------------------------------------------

@dataclass
class LpBoundReport:
    p: float
    R: float
    cloud_size: int
    n_eval: int
    rows: list = field(default_factory=list)  # (name, ratio)
    max_ratio: float = 0.0

    def as_dict(self):
        return {"p": self.p, "R": self.R, "cloud_size": self.cloud_size,
                "n_eval": self.n_eval, "max_ratio": self.max_ratio,
                "ratios": {k: v for k, v in self.rows}}


def default_test_family(manifold: Manifold):
    """Cap indicators at three scales plus two smooth bumps and a constant."""
    geom = sphere if manifold is Manifold.SPHERE2 else torus
    if manifold is Manifold.SPHERE2:
        c1, c2 = np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])
    else:
        c1, c2 = np.array([np.pi, np.pi]), np.array([1.0, 4.0])

    def cap(center, r):
        return lambda pts: (geom.dist(pts, center) < r).astype(float)

    def bump(center, r):
        def f(pts):
            d = geom.dist(pts, center) / r
            out = np.zeros(len(pts))
            m = d < 1.0
            out[m] = np.exp(-1.0 / (1.0 - d[m] ** 2))
            return out
        return f

    return [
        ("constant", lambda pts: np.ones(len(pts))),
        ("cap_small", cap(c1, 0.1)),
        ("cap_mid", cap(c1, 0.3)),
        ("cap_large", cap(c2, 0.6)),
        ("bump_narrow", bump(c2, 0.25)),
        ("bump_wide", bump(c1, 0.8)),
    ]


def verify_lp_bound(manifold: Manifold, p: float, R: float, n_eval: int = 200,
                    rng_seed=0, cloud_n: int = DEFAULT_CLOUD, family=None,
                    r_grid: int = 16) -> LpBoundReport:
    """Estimate ||M_R f||_p / ||f||_p over a function family; report the worst."""
    if p <= 1:
        raise UsageError("the maximal inequality needs p > 1")
    family = default_test_family(manifold) if family is None else family
    xs = sample_uniform_batch(manifold, n_eval, rng_seed, stream=("lp_eval",))
    rep = LpBoundReport(p=p, R=R, cloud_size=cloud_n, n_eval=n_eval)
    vol = manifold.volume
    for name, fn in family:
        samples = ScalarFieldSamples.from_function(manifold, fn, cloud_n, rng_seed)
        mf = maximal_function_batch(samples, xs, R, r_grid)
        num = (vol * np.mean(mf ** p)) ** (1.0 / p)
        den = samples.lp_norm(p)
        ratio = float(num / den) if den > 0 else np.inf
        rep.rows.append((name, ratio))
    rep.max_ratio = float(max(r for _, r in rep.rows))
    return rep


# --- Lipschitz-type estimate ----------------------------------------------------------

@dataclass
class LipschitzReport:
    n_pairs: int
    n_used: int
    n_skipped: int
    violations: int
    percentile_999: float
    max_constant: float

    def as_dict(self):
        return dict(self.__dict__)


def verify_lipschitz_estimate(manifold: Manifold, u_fn, grad_norm_fn,
                              n_pairs: int = 20_000, rng_seed=0,
                              cloud_n: int = DEFAULT_CLOUD, R: float | None = None,
                              pair_filter=None) -> LipschitzReport:
    """Empirical constants in |u(x)-u(y)| <= K dis(x,y) (M|grad u|(x) + M|grad u|(y)).

    Pairs are drawn with dis < lambda^2 rho. Pairs whose numerator and
    denominator both vanish are skipped; a nonzero increment over a vanishing
    denominator counts as a violation witness.
    """
    atlas = default_atlas(manifold)
    R = atlas.rho if R is None else R
    x, y = sample_pairs_within(manifold, n_pairs, atlas.lam ** 2 * atlas.rho,
                               rng_seed, stream=("lip",))
    if pair_filter is not None:
        keep = pair_filter(x, y)
        x, y = x[keep], y[keep]
    geom = sphere if manifold is Manifold.SPHERE2 else torus
    d = geom.dist(x, y)
    pos = d > 1e-12
    x, y, d = x[pos], y[pos], d[pos]

    cloud = ScalarFieldSamples.from_function(manifold, grad_norm_fn, cloud_n, rng_seed)
    mx = maximal_function_batch(cloud, x, R)
    my = maximal_function_batch(cloud, y, R)
    num = np.abs(np.asarray(u_fn(x)) - np.asarray(u_fn(y)))
    den = d * (mx + my)

    skip = (den < 1e-12) & (num < 1e-12)
    viol = (den < 1e-12) & (num >= 1e-12)
    used = ~skip & ~viol
    K = num[used] / den[used]
    return LipschitzReport(
        n_pairs=n_pairs, n_used=int(used.sum()), n_skipped=int(skip.sum()),
        violations=int(viol.sum()),
        percentile_999=float(np.percentile(K, 99.9)) if used.any() else 0.0,
        max_constant=float(K.max(initial=0.0)),
    )
