"""Minimizing geodesics, the parallel-transport ODE and distance gradients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegeneratePairError, InvalidSegmentError, UsageError
from . import sphere, torus
from .atlas import Atlas, default_atlas
from .base import Manifold, ManifoldPoint, TangentVector, require_same_manifold

CUT_LOCUS_MARGIN = 1e-6


def _geom(manifold):
    return sphere if manifold is Manifold.SPHERE2 else torus


def distance(x: ManifoldPoint, y: ManifoldPoint) -> float:
    """Riemannian distance; arccos of the inner product on S^2, wrapped Euclidean on T^2."""
    m = require_same_manifold(x, y)
    return float(_geom(m).dist(x.coords, y.coords))


@dataclass(frozen=True)
class GeodesicSegment:
    """Unit-speed minimizing geodesic sampled uniformly in arc length."""

    from_point: ManifoldPoint
    to_point: ManifoldPoint
    length: float
    samples: np.ndarray  # (n_samples, ambient_dim), gamma(s_i), s_i uniform in [0, length]

    @property
    def manifold(self):
        return self.from_point.manifold

    @property
    def n_samples(self):
        return self.samples.shape[0]

    def velocities(self):
        """gamma_dot at every sample (unit vectors; zero for a degenerate segment)."""
        g = _geom(self.manifold)
        if self.length < 1e-15:
            return np.zeros_like(self.samples)
        x = self.from_point.coords
        u0 = g.log_map(x, self.to_point.coords) / self.length
        if self.manifold is Manifold.TORUS2:
            return np.broadcast_to(u0, self.samples.shape).copy()
        s = np.linspace(0.0, self.length, self.n_samples)
        return (-np.sin(s)[:, None] * x[None, :]
                + np.cos(s)[:, None] * u0[None, :])


def minimizing_geodesic(x: ManifoldPoint, y: ManifoldPoint, n_samples: int = 65) -> GeodesicSegment:
    """Sample the unique minimizing geodesic from x to y.

    n_samples is rounded up to the next odd value so the transport ODE can take
    fourth-order steps across sample pairs. Raises DegeneratePairError at or
    beyond the cut locus.
    """
    m = require_same_manifold(x, y)
    if n_samples < 2:
        raise UsageError("n_samples must be >= 2")
    if n_samples % 2 == 0:
        n_samples += 1
    d = distance(x, y)
    if d >= m.injectivity_radius - CUT_LOCUS_MARGIN:
        raise DegeneratePairError("pair at distance %.6f is within %g of the cut locus"
                                  % (d, CUT_LOCUS_MARGIN))
    s = np.linspace(0.0, 1.0, n_samples)
    pts = _geom(m).geodesic_points(x.coords, y.coords, s)
    return GeodesicSegment(x, y, d, pts)


def _transport_rk4_chart(chart, xi, xd, Y, h):
    """One RK4 step of dY/ds = -Gamma(xi) Y xd over [s, s+h].

    xi, xd: chart positions/velocities at (s, s+h/2, s+h), shapes (3, B, 2);
    Y: (B, 2). Returns updated Y.
    """
    def rhs(stage, Yc):
        G = chart.christoffel_at(xi[stage])          # (B,2,2,2)
        return -np.einsum("...kij,...i,...j->...k", G, Yc, xd[stage])

    k1 = rhs(0, Y)
    k2 = rhs(1, Y + 0.5 * h * k1)
    k3 = rhs(1, Y + 0.5 * h * k2)
    k4 = rhs(2, Y + h * k3)
    return Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def parallel_transport(v: TangentVector, seg: GeodesicSegment,
                       atlas: Atlas | None = None) -> TangentVector:
    """Transport v along seg by integrating the chart ODE with RK4.

    Steps span consecutive sample pairs; the active chart follows the deepest
    chart of the running base point, converting components through the ambient
    tangent space at every switch.
    """
    if v.base != seg.from_point:
        raise InvalidSegmentError("vector is based at %r, segment starts at %r"
                                  % (v.base.coords, seg.from_point.coords))
    if seg.length < 1e-15:
        return TangentVector(seg.to_point, v.components)
    if atlas is None:
        atlas = default_atlas(seg.manifold)

    pts = seg.samples
    vel = seg.velocities()
    n = pts.shape[0]
    h = seg.length / ((n - 1) // 2)

    a = int(atlas.deepest_chart(pts[0]))
    chart = atlas.charts[a]
    Y = chart.pull(pts[0:1], v.components[None, :])
    for i in range(0, n - 2, 2):
        a_new = int(atlas.deepest_chart(pts[i]))
        if a_new != a:
            amb = chart.push(chart.to_chart(pts[i:i + 1]), Y)
            a = a_new
            chart = atlas.charts[a]
            Y = chart.pull(pts[i:i + 1], amb)
        tri = slice(i, i + 3)
        xi = chart.to_chart(pts[tri])[:, None, :]
        xd = chart.pull(pts[tri], vel[tri])[:, None, :]
        Y = _transport_rk4_chart(chart, xi, xd, Y, h)
    amb = chart.push(chart.to_chart(pts[-1:]), Y)[0]
    if seg.manifold is Manifold.SPHERE2:
        amb = amb - np.dot(amb, pts[-1]) * pts[-1]
    return TangentVector(seg.to_point, amb)


def transport_batch(atlas: Atlas, x, y, v, n_steps: int = 128):
    """Vectorized single-chart transport for pairs with a common chart.

    x, y: (B, dim) points with dist < atlas.rho (so a common chart exists);
    v: (B, dim) ambient tangent vectors at x. Returns (B, dim) vectors at y.
    """
    if atlas.manifold is Manifold.TORUS2:
        return np.array(v, copy=True)
    d = sphere.dist(x, y)
    u0 = sphere.log_map(x, y) / np.where(d > 1e-15, d, 1.0)[:, None]
    # deepest common chart per pair: chart center nearest to the midpoint
    mid = sphere.geodesic_points(x, y, np.array([0.5]))[:, 0, :]
    aidx = atlas.deepest_chart(mid)
    out = np.empty_like(v)
    s = np.linspace(0.0, 1.0, 2 * n_steps + 1)
    for a in np.unique(aidx):
        chart = atlas.charts[a]
        rows = np.where(aidx == a)[0]
        xr, dr, ur = x[rows], d[rows], u0[rows]
        sl = s[None, :, None] * dr[:, None, None]
        pts = (np.cos(sl) * xr[:, None, :] + np.sin(sl) * ur[:, None, :])
        vels = (-np.sin(sl) * xr[:, None, :] + np.cos(sl) * ur[:, None, :])
        xi = chart.to_chart(pts)
        xd = chart.pull(pts, vels)
        Y = chart.pull(xr, v[rows])
        h = dr / n_steps
        for i in range(0, 2 * n_steps, 2):
            tri = (
                xi[:, i:i + 3].transpose(1, 0, 2),
                xd[:, i:i + 3].transpose(1, 0, 2),
            )
            Y = _transport_rk4_chart(chart, tri[0], tri[1], Y, h[:, None])
        amb = chart.push(xi[:, -1], Y)
        yr = y[rows]
        amb = amb - np.sum(amb * yr, axis=1, keepdims=True) * yr
        out[rows] = amb
    return out


def grad_dist_sq(x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
    """Gradient of dis^2(., y) at x: -2 dis(x,y) gamma_dot(0) = -2 log_x(y)."""
    m = require_same_manifold(x, y)
    d = distance(x, y)
    if d < 1e-15:
        return TangentVector(x, np.zeros(m.ambient_dim))
    if d >= m.injectivity_radius - CUT_LOCUS_MARGIN:
        raise DegeneratePairError("gradient undefined at the cut locus (dis=%.6f)" % d)
    return TangentVector(x, -2.0 * _geom(m).log_map(x.coords, y.coords))


def grad_dist(x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
    """Gradient of dis(., y) at x (unit vector pointing away from y)."""
    m = require_same_manifold(x, y)
    return TangentVector(x, _geom(m).grad_dist(x.coords, y.coords))
