"""Chart-wise mollification glued by the partition of unity.

The smoothed field is

    X_n = sum_alpha psi_alpha * (X^k_alpha convolved with zeta_n) d/dxi^k_alpha

with zeta_n(xi) = n^2 zeta(n xi) and zeta a normalized bump supported in the
unit disk. Convolutions are evaluated by a fixed tensor-product Gauss-Legendre
rule; the kernel is normalized against that same rule, so mollifying a field
with constant chart components reproduces it exactly and the quadrature of the
kernel derivative of a constant vanishes identically (symmetric nodes).
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..errors import UsageError
from ..geometry.base import Manifold
from .base import VectorField

QUAD_POINTS_1D = 16


def _build_quadrature(n1d=QUAD_POINTS_1D, sharpness=1.0):
    nodes1, w1 = leggauss(n1d)
    X, Y = np.meshgrid(nodes1, nodes1, indexing="ij")
    nodes = np.stack([X.ravel(), Y.ravel()], axis=1)          # (Q, 2) in [-1, 1]^2
    w = np.outer(w1, w1).ravel()
    r2 = np.sum(nodes * nodes, axis=1)
    zeta = np.zeros_like(r2)
    inside = r2 < 1.0
    zeta[inside] = np.exp(-sharpness / (1.0 - r2[inside]))
    mass = float(np.sum(w * zeta))
    value_w = w * zeta / mass                                  # integrates 1 exactly
    dzeta = np.zeros_like(nodes)
    q = (1.0 - r2[inside]) ** 2
    dzeta[inside] = zeta[inside, None] * (-2.0 * sharpness * nodes[inside] / q[:, None])
    deriv_w = w[:, None] * dzeta / mass                        # (Q, 2)
    # calibrate the derivative rule so differentiating a linear field is exact:
    # the continuous identity int u_i d_i zeta = -int zeta picks up a larger
    # quadrature error than the mass itself
    for i in range(2):
        deriv_w[:, i] *= 1.0 / (-np.sum(deriv_w[:, i] * nodes[:, i]))
    return nodes, value_w, deriv_w


_QUAD_CACHE = {}


def _quadrature(n1d, sharpness=1.0):
    key = (n1d, sharpness)
    if key not in _QUAD_CACHE:
        _QUAD_CACHE[key] = _build_quadrature(n1d, sharpness)
    return _QUAD_CACHE[key]


class MollifiedField(VectorField):
    """The partition-of-unity mollification of a base field at level n."""

    kind = "mollified"

    def __init__(self, base: VectorField, n: int, quad_points: int = QUAD_POINTS_1D):
        if n < 1:
            raise UsageError("mollification level must be a positive integer")
        super().__init__(base.manifold, base.atlas, "mollify(%s, %d)" % (base.name, n))
        self.base = base
        self.n = int(n)
        self.quad_points = int(quad_points)
        # read-only quadrature caches
        nodes, value_w, deriv_w = _quadrature(self.quad_points)
        self._nodes = nodes / self.n
        self._value_w = value_w
        self._deriv_w = deriv_w * self.n   # d/dxi of conv picks up one factor n

    # --- convolved chart components ------------------------------------------
    def _clamp(self, chart, pts):
        """Nearest-point extension: clamp quadrature nodes into the chart image."""
        if self.manifold is Manifold.SPHERE2:
            r = np.linalg.norm(pts, axis=-1, keepdims=True)
            lim = chart.chart_radius * (1.0 - 1e-9)
            scale = np.where(r > lim, lim / np.where(r > 0, r, 1.0), 1.0)
            return pts * scale
        lim = chart.half_side * (1.0 - 1e-12)
        return np.clip(pts, -lim, lim)

    def _base_at_nodes(self, chart, xi):
        pts = xi[..., None, :] - self._nodes                     # (..., Q, 2)
        pts = self._clamp(chart, pts)
        flat = pts.reshape(-1, 2)
        comp = self.base.chart_components(chart, flat)
        return comp.reshape(pts.shape)

    def conv_components(self, chart, xi):
        """(X^k_alpha * zeta_n)(xi) for one chart, shape (..., 2)."""
        vals = self._base_at_nodes(chart, np.asarray(xi, dtype=float))
        return np.einsum("...qk,q->...k", vals, self._value_w)

    def conv_jacobian(self, chart, xi):
        """Exact quadrature of d_i (X^k * zeta_n); J[..., i, k]."""
        vals = self._base_at_nodes(chart, np.asarray(xi, dtype=float))
        return np.einsum("...qk,qi->...ik", vals, self._deriv_w)

    # --- field interface --------------------------------------------------------
    def _glued(self, x, want_value=True, want_div=False):
        """One pass over contributing charts, sharing the node evaluations.

        div X_n = sum_a [ psi_a (C_a^k Gamma^i_{ki} + tr dC_a) + C_a^k d_k psi_a ]
        with every term evaluated in chart a's own coordinates.
        """
        x = np.asarray(x, dtype=float)
        psi = self.atlas.partition(x)
        dpsi_amb = self.atlas.partition_grad_ambient(x) if want_div else None
        val = np.zeros_like(x) if want_value else None
        div = np.zeros(x.shape[0]) if want_div else None
        for a, chart in enumerate(self.atlas.charts):
            rows = psi[:, a] > 0.0
            if not np.any(rows):
                continue
            xi = chart.to_chart(x[rows])
            nodes = self._base_at_nodes(chart, xi)
            conv = np.einsum("...qk,q->...k", nodes, self._value_w)
            if want_value:
                val[rows] += psi[rows, a][:, None] * chart.push(xi, conv)
            if want_div:
                J = np.einsum("...qk,qi->...ik", nodes, self._deriv_w)
                trace = chart.christoffel_trace(xi)
                div_a = J[..., 0, 0] + J[..., 1, 1] + np.sum(conv * trace, axis=-1)
                dpsi_chart = chart.pull(x[rows], dpsi_amb[rows, a, :])
                # gradient covector in chart coords: lower the pulled vector with g
                g = chart.metric_at(xi)
                dpsi_cov = np.einsum("...ij,...j->...i", g, dpsi_chart)
                div[rows] += psi[rows, a] * div_a + np.sum(conv * dpsi_cov, axis=-1)
        return val, div

    def eval_ambient(self, x):
        return self._glued(x, want_value=True, want_div=False)[0]

    def divergence_batch(self, x, skip_singular=False):
        return self._glued(x, want_value=False, want_div=True)[1]

    def eval_with_divergence(self, x):
        return self._glued(x, want_value=True, want_div=True)


def mollify(field: VectorField, n: int, quad_points: int = QUAD_POINTS_1D) -> MollifiedField:
    """Smooth ``field`` at level n per the chart-convolution construction.

    quad_points is the one-dimensional Gauss-Legendre resolution of the kernel
    rule (16 by default; flow experiments may trade it down for speed since all
    their functionals are computed from the same discrete field).
    """
    return MollifiedField(field, n, quad_points)
