"""Normal-coordinate atlases with metric, Christoffel symbols and partition of unity.

Sphere charts are stereographic projections from the cap antipode onto the
tangent plane at the cap center, rescaled by a constant kappa chosen so the
metric eigenvalues over the whole cap sit strictly inside [lambda, 1/lambda]
for the declared lambda = 0.5.  Torus charts are translated identity charts.
"""
from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .base import Manifold, ManifoldPoint, TWO_PI
from . import sphere, torus

# sphere atlas constants
SPHERE_KAPPA = np.sqrt(0.7)
SPHERE_CAP_RADIUS = 1.2          # geodesic radius of each chart domain
SPHERE_BUMP_RADIUS = 0.98        # support radius of the partition bumps
SPHERE_LAMBDA = 0.5
SPHERE_RHO = 0.5

# torus atlas constants
TORUS_HALF_SIDE = 2.85           # chart domain = open square (-h, h)^2 around center
TORUS_BUMP_RADIUS = 2.5
TORUS_LAMBDA = 1.0
TORUS_RHO = 0.5

SWITCH_FRACTION = 0.8            # re-chart beyond this fraction of the domain radius


def _sphere_rotations(centers):
    """Per-chart rotation taking the chart center to the north pole e3."""
    rots = []
    for c in centers:
        if abs(c[2]) < 0.5:
            t1 = np.cross([0.0, 0.0, 1.0], c)
        else:
            t1 = np.cross([1.0, 0.0, 0.0], c)
        t1 = t1 / np.linalg.norm(t1)
        t2 = np.cross(c, t1)
        rots.append(np.array([t1, t2, c]))
    return np.array(rots)


class SphereChart:
    """One stereographic cap chart of the 6-cap sphere atlas."""

    manifold = Manifold.SPHERE2

    def __init__(self, chart_id, center, rot, kappa=SPHERE_KAPPA,
                 radius=SPHERE_CAP_RADIUS, bump_radius=SPHERE_BUMP_RADIUS):
        self.id = chart_id
        self.center_coords = np.asarray(center, dtype=float)
        self.rot = rot
        self.kappa = kappa
        self.radius = radius
        self.bump_radius = bump_radius
        # chart-plane radius of the cap: |xi| = 2*kappa*tan(r/2)
        self.chart_radius = 2.0 * kappa * np.tan(0.5 * radius)
        self.switch_radius = 2.0 * kappa * np.tan(0.5 * SWITCH_FRACTION * radius)
        # the stereographic map is defined far beyond the cap; only an approach
        # to the antipode breaks it, so integrator stages may overshoot safely
        self.max_excursion = 4.0
        # axis-aligned centers make rot a signed permutation; cache it so the
        # hot paths replace 3x3 matmuls with indexed assembly
        self._perm = None
        if np.all(np.isin(np.abs(rot), (0.0, 1.0))):
            self._perm = np.argmax(np.abs(rot), axis=1)       # rot[i, perm[i]] = +-1
            self._sgn = rot[np.arange(3), self._perm]

    def _apply_rot(self, v):
        """v @ rot.T (world -> pole frame)."""
        if self._perm is None:
            return v @ self.rot.T
        return v[..., self._perm] * self._sgn

    def _apply_rot_t(self, y):
        """y @ rot (pole frame -> world)."""
        if self._perm is None:
            return y @ self.rot
        out = np.empty_like(y)
        out[..., self._perm] = y * self._sgn
        return out

    @property
    def center(self):
        return ManifoldPoint(Manifold.SPHERE2, self.center_coords)

    def to_chart(self, x):
        y = self._apply_rot(np.asarray(x, dtype=float))
        return 2.0 * self.kappa * y[..., :2] / (1.0 + y[..., 2:3])

    def from_chart(self, xi):
        xi = np.asarray(xi, dtype=float)
        u = xi / self.kappa
        u2 = np.sum(u * u, axis=-1, keepdims=True)
        denom = 4.0 + u2
        y = np.empty(xi.shape[:-1] + (3,))
        y[..., :2] = 4.0 * u / denom
        y[..., 2:3] = (4.0 - u2) / denom
        return self._apply_rot_t(y)

    def contains(self, x, slack=0.0):
        return sphere.dist(np.asarray(x), self.center_coords) < self.radius + slack

    def center_dist(self, x):
        return sphere.dist(np.asarray(x), self.center_coords)

    def _sigma(self, xi):
        return self.kappa + np.sum(xi * xi, axis=-1) / (4.0 * self.kappa)

    def metric_at(self, xi):
        """Conformal metric g_ij = delta_ij / sigma(xi)^2."""
        xi = np.asarray(xi, dtype=float)
        s = self._sigma(xi)
        g = np.zeros(xi.shape[:-1] + (2, 2))
        g[..., 0, 0] = 1.0 / s ** 2
        g[..., 1, 1] = 1.0 / s ** 2
        return g

    def metric_eigs(self, xi):
        """Both eigenvalues coincide for a conformal metric."""
        s = self._sigma(np.asarray(xi, dtype=float))
        e = 1.0 / s ** 2
        return np.stack([e, e], axis=-1)

    def dphi(self, xi):
        """Gradient of the conformal exponent phi = -log sigma."""
        s = self._sigma(xi)
        return -xi / (2.0 * self.kappa * s[..., None])

    def christoffel_at(self, xi):
        """Gamma^k_ij = d_ik dphi_j + d_jk dphi_i - d_ij dphi_k (conformal 2-d)."""
        xi = np.asarray(xi, dtype=float)
        dp = self.dphi(xi)
        G = np.zeros(xi.shape[:-1] + (2, 2, 2))
        for k in range(2):
            for i in range(2):
                for j in range(2):
                    G[..., k, i, j] = ((k == i) * dp[..., j] + (k == j) * dp[..., i]
                                       - (i == j) * dp[..., k])
        return G

    def christoffel_trace(self, xi):
        """Gamma^i_{ki} as a vector over k; equals 2*dphi_k in conformal 2-d."""
        return 2.0 * self.dphi(np.asarray(xi, dtype=float))

    def push(self, xi, comp):
        """Chart components at xi -> ambient tangent vector at from_chart(xi)."""
        xi = np.asarray(xi, dtype=float)
        comp = np.asarray(comp, dtype=float)
        u = xi / self.kappa
        u2 = np.sum(u * u, axis=-1, keepdims=True)
        D = 4.0 + u2
        cu = np.sum(u * comp, axis=-1, keepdims=True) / self.kappa  # = u . du
        dy = np.empty(xi.shape[:-1] + (3,))
        dy[..., :2] = (4.0 / D) * (comp / self.kappa - 2.0 * u * cu / D)
        dy[..., 2:3] = -16.0 * cu / D ** 2
        return self._apply_rot_t(dy)

    def pull(self, x, v):
        """Ambient tangent v at x -> chart components."""
        y = self._apply_rot(np.asarray(x, dtype=float))
        w = self._apply_rot(np.asarray(v, dtype=float))
        s = 1.0 + y[..., 2:3]
        return 2.0 * self.kappa * (w[..., :2] - y[..., :2] * w[..., 2:3] / s) / s


class TorusChart:
    """Identity chart on a translated fundamental square of the flat torus."""

    manifold = Manifold.TORUS2

    def __init__(self, chart_id, center, half_side=TORUS_HALF_SIDE,
                 bump_radius=TORUS_BUMP_RADIUS):
        self.id = chart_id
        self.center_coords = np.asarray(center, dtype=float)
        self.half_side = half_side
        self.radius = half_side          # inscribed geodesic radius of the square
        self.bump_radius = bump_radius
        self.chart_radius = half_side
        self.switch_radius = SWITCH_FRACTION * half_side
        self.max_excursion = 2.0 * np.pi  # a full wrap in one step is a failure

    @property
    def center(self):
        return ManifoldPoint(Manifold.TORUS2, self.center_coords)

    def to_chart(self, x):
        return torus.wrap_diff(np.asarray(x, dtype=float), self.center_coords)

    def from_chart(self, xi):
        return np.mod(np.asarray(xi, dtype=float) + self.center_coords, TWO_PI)

    def contains(self, x, slack=0.0):
        xi = self.to_chart(x)
        return np.max(np.abs(xi), axis=-1) < self.half_side + slack

    def center_dist(self, x):
        return torus.dist(np.asarray(x), self.center_coords)

    def metric_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        g = np.zeros(xi.shape[:-1] + (2, 2))
        g[..., 0, 0] = 1.0
        g[..., 1, 1] = 1.0
        return g

    def metric_eigs(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.ones(xi.shape[:-1] + (2,))

    def christoffel_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.zeros(xi.shape[:-1] + (2, 2, 2))

    def christoffel_trace(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.zeros_like(xi)

    def push(self, xi, comp):
        return np.array(comp, dtype=float, copy=True)

    def pull(self, x, v):
        return np.array(v, dtype=float, copy=True)


class Atlas:
    """Finite chart cover with covering constants and a smooth partition of unity."""

    def __init__(self, manifold, charts, lam, rho, bump_sharpness=1.0):
        self.manifold = manifold
        self.charts = charts
        self.lam = lam
        self.rho = rho
        self.bump_sharpness = bump_sharpness
        self.n_charts = len(charts)
        self._geom = sphere if manifold is Manifold.SPHERE2 else torus
        self._centers = np.array([c.center_coords for c in charts])

    # --- partition of unity -------------------------------------------------
    def bump(self, r):
        """Compactly supported bump exp(-s/(1 - r^2)) on r < 1."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        m = r < 1.0
        out[m] = np.exp(-self.bump_sharpness / (1.0 - r[m] ** 2))
        return out

    def bump_deriv(self, r):
        """d/dr of the bump (zero outside the support and at r = 0)."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        m = r < 1.0
        q = 1.0 - r[m] ** 2
        out[m] = np.exp(-self.bump_sharpness / q) * (-2.0 * self.bump_sharpness * r[m] / q ** 2)
        return out

    def raw_bumps(self, x):
        """Unnormalized bump values, shape (..., n_charts)."""
        x = np.asarray(x, dtype=float)
        vals = [self.bump(c.center_dist(x) / c.bump_radius) for c in self.charts]
        return np.stack(vals, axis=-1)

    def partition(self, x):
        """Normalized partition-of-unity weights psi_alpha(x), summing to 1."""
        raw = self.raw_bumps(x)
        total = np.sum(raw, axis=-1, keepdims=True)
        if np.any(total <= 0.0):
            raise UsageError("partition of unity vanished; atlas does not cover the point")
        return raw / total

    def partition_grad_ambient(self, x):
        """Ambient gradient of each psi_alpha at x, shape (..., n_charts, ambient_dim).

        Uses d(dis(., c)) = unit tangent pointing away from c; the bump is flat
        at r = 0 so the center singularity is removable.
        """
        x = np.asarray(x, dtype=float)
        B = x.shape[:-1]
        dim = self.manifold.ambient_dim
        raw = np.empty(B + (self.n_charts,))
        draw = np.zeros(B + (self.n_charts, dim))
        for a, c in enumerate(self.charts):
            d = c.center_dist(x)
            r = d / c.bump_radius
            raw[..., a] = self.bump(r)
            db = self.bump_deriv(r) / c.bump_radius
            centers = np.broadcast_to(c.center_coords, x.shape)
            away = self._geom.grad_dist(x, centers)
            draw[..., a, :] = db[..., None] * away
        S = np.sum(raw, axis=-1, keepdims=True)
        dS = np.sum(draw, axis=-2, keepdims=True)
        return draw / S[..., None] - raw[..., None] * dS / S[..., None] ** 2

    # --- chart membership ---------------------------------------------------
    def deepest_chart(self, x):
        """Index of the chart whose center is nearest (max containment margin).

        Uses monotone proxies for the distance (inner products on the sphere,
        squared wrapped offsets on the torus) to stay cheap on large batches.
        """
        x = np.asarray(x, dtype=float)
        if self.manifold is Manifold.SPHERE2:
            return np.argmax(x @ self._centers.T, axis=-1)
        diff = torus.wrap_diff(x[..., None, :], self._centers)
        return np.argmin(np.sum(diff * diff, axis=-1), axis=-1)

    def common_charts(self, x, y):
        """Ids of charts containing both points, deepest first."""
        ids = []
        depth = []
        for c in self.charts:
            if c.contains(x) and c.contains(y):
                ids.append(c.id)
                depth.append(max(float(c.center_dist(x)), float(c.center_dist(y))))
        order = np.argsort(depth)
        return [ids[i] for i in order]


def build_atlas(manifold: Manifold, bump_sharpness=1.0) -> Atlas:
    if manifold is Manifold.SPHERE2:
        centers = np.array([[1, 0, 0], [-1, 0, 0],
                            [0, 1, 0], [0, -1, 0],
                            [0, 0, 1], [0, 0, -1]], dtype=float)
        rots = _sphere_rotations(centers)
        charts = [SphereChart(i, centers[i], rots[i]) for i in range(6)]
        return Atlas(manifold, charts, SPHERE_LAMBDA, SPHERE_RHO, bump_sharpness)
    if manifold is Manifold.TORUS2:
        centers = np.array([[0, 0], [np.pi, 0], [0, np.pi], [np.pi, np.pi]], dtype=float)
        charts = [TorusChart(i, centers[i]) for i in range(4)]
        return Atlas(manifold, charts, TORUS_LAMBDA, TORUS_RHO, bump_sharpness)
    raise UsageError("unknown manifold %r" % (manifold,))


_ATLAS_CACHE = {}


def default_atlas(manifold: Manifold) -> Atlas:
    """Shared immutable atlas instance per manifold."""
    if manifold not in _ATLAS_CACHE:
        _ATLAS_CACHE[manifold] = build_atlas(manifold)
    return _ATLAS_CACHE[manifold]
