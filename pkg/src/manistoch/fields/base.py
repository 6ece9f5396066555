"""Vector fields on the built-in manifolds with chart-formula calculus.

A field is primarily an ambient evaluator; chart components, Jacobians,
divergence and covariant-derivative norms all flow through the active chart
via the formulas

    div X |_U      = X^k Gamma^i_{ki} + d_k X^k
    (nabla X)^k_i  = d_i X^k + X^j Gamma^k_{ji}

with derivatives taken analytically where a closed form is registered and by
central finite differences otherwise.
"""
from __future__ import annotations

import numpy as np

from ..errors import SingularPointError, UsageError
from ..geometry.atlas import Atlas, default_atlas
from ..geometry.base import Manifold, ManifoldPoint, TangentVector

FD_STEP = 1e-6


class VectorField:
    kind = "abstract"

    def __init__(self, manifold: Manifold, atlas: Atlas | None = None, name: str = ""):
        self.manifold = manifold
        self.atlas = atlas if atlas is not None else default_atlas(manifold)
        self.name = name or self.__class__.__name__

    # --- evaluation ---------------------------------------------------------
    def eval_ambient(self, x: np.ndarray) -> np.ndarray:
        """Field values as ambient tangent vectors; x is (B, dim)."""
        raise NotImplementedError

    def eval(self, x: ManifoldPoint) -> TangentVector:
        if x.manifold is not self.manifold:
            raise UsageError("point on %s, field on %s" % (x.manifold, self.manifold))
        return TangentVector(x, self.eval_ambient(x.coords[None, :])[0])

    def singular_mask(self, x: np.ndarray) -> np.ndarray:
        """Points where first derivatives of the field do not exist."""
        return np.zeros(x.shape[0], dtype=bool)

    # --- chart calculus -------------------------------------------------------
    def chart_components(self, chart, xi: np.ndarray) -> np.ndarray:
        pts = chart.from_chart(xi)
        return chart.pull(pts, self.eval_ambient(pts))

    def chart_jacobian(self, chart, xi: np.ndarray, fd_step: float = FD_STEP) -> np.ndarray:
        """J[..., i, k] = d_i X^k by central differences of the chart components."""
        J = np.empty(xi.shape[:-1] + (2, 2))
        for i in range(2):
            e = np.zeros(2)
            e[i] = fd_step
            J[..., i, :] = (self.chart_components(chart, xi + e)
                            - self.chart_components(chart, xi - e)) / (2.0 * fd_step)
        return J

    def _guard_singular(self, x, skip_singular):
        sing = self.singular_mask(x)
        if np.any(sing):
            if not skip_singular:
                raise SingularPointError(
                    "%s evaluated on its singular set at %d point(s)"
                    % (self.name, int(sing.sum())))
        return sing

    def divergence_batch(self, x: np.ndarray, skip_singular: bool = False) -> np.ndarray:
        """Chart-formula divergence at each point (NaN on skipped singular hits)."""
        sing = self._guard_singular(x, skip_singular)
        out = np.full(x.shape[0], np.nan)
        ok = ~sing
        aidx = self.atlas.deepest_chart(x[ok])
        rows_ok = np.where(ok)[0]
        for a in np.unique(aidx):
            chart = self.atlas.charts[a]
            rows = rows_ok[aidx == a]
            xi = chart.to_chart(x[rows])
            J = self.chart_jacobian(chart, xi)
            comp = self.chart_components(chart, xi)
            trace = chart.christoffel_trace(xi)
            out[rows] = J[..., 0, 0] + J[..., 1, 1] + np.sum(comp * trace, axis=-1)
        return out

    def divergence(self, x: ManifoldPoint) -> float:
        self._guard_singular(x.coords[None, :], skip_singular=False)
        return float(self.divergence_batch(x.coords[None, :], skip_singular=True)[0])

    def eval_with_divergence(self, x: np.ndarray):
        """Value and divergence together; subclasses override to share work."""
        return self.eval_ambient(x), self.divergence_batch(x, skip_singular=True)

    def cov_deriv_norm_batch(self, x: np.ndarray, skip_singular: bool = False) -> np.ndarray:
        """Frobenius norm |nabla X| in an orthonormal frame (NaN on skipped hits)."""
        sing = self._guard_singular(x, skip_singular)
        out = np.full(x.shape[0], np.nan)
        ok = ~sing
        aidx = self.atlas.deepest_chart(x[ok])
        rows_ok = np.where(ok)[0]
        for a in np.unique(aidx):
            chart = self.atlas.charts[a]
            rows = rows_ok[aidx == a]
            xi = chart.to_chart(x[rows])
            J = self.chart_jacobian(chart, xi)
            comp = self.chart_components(chart, xi)
            G = chart.christoffel_at(xi)
            A = J + np.einsum("...j,...kji->...ik", comp, G)
            g = chart.metric_at(xi)
            ginv = np.linalg.inv(g)
            out[rows] = np.sqrt(np.einsum("...ij,...kl,...ik,...jl->...", ginv, g, A, A))
        return out

    def cov_deriv_norm(self, x: ManifoldPoint) -> float:
        return float(self.cov_deriv_norm_batch(x.coords[None, :])[0])

    def first_order_norm_batch(self, x, skip_singular=False):
        """|X|_1(x) = |X|_x + |nabla X|_x."""
        return (np.linalg.norm(self.eval_ambient(x), axis=-1)
                + self.cov_deriv_norm_batch(x, skip_singular=skip_singular))


class AnalyticField(VectorField):
    """Field given by an ambient closed form, optionally with analytic extras."""

    kind = "analytic"

    def __init__(self, manifold, ambient_fn, div_fn=None, singular_fn=None,
                 atlas=None, name="analytic"):
        super().__init__(manifold, atlas, name)
        self._ambient_fn = ambient_fn
        self._div_fn = div_fn
        self._singular_fn = singular_fn

    def eval_ambient(self, x):
        return self._ambient_fn(np.asarray(x, dtype=float))

    def singular_mask(self, x):
        if self._singular_fn is None:
            return np.zeros(x.shape[0], dtype=bool)
        return self._singular_fn(np.asarray(x, dtype=float))

    def divergence_batch(self, x, skip_singular=False):
        if self._div_fn is None:
            return super().divergence_batch(x, skip_singular=skip_singular)
        # a registered closed form is authoritative a.e.; it extends continuously
        # where it can (rough sphere: zero) and yields nan where it cannot
        return self._div_fn(np.asarray(x, dtype=float))


class ChartComponentField(VectorField):
    """Field specified by per-chart component functions xi -> (B, 2)."""

    kind = "chart_components"

    def __init__(self, manifold, component_fns, atlas=None, name="chart_field"):
        super().__init__(manifold, atlas, name)
        if len(component_fns) != self.atlas.n_charts:
            raise UsageError("need one component function per chart")
        self._fns = component_fns

    def chart_components(self, chart, xi):
        return self._fns[chart.id](np.asarray(xi, dtype=float))

    def eval_ambient(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        aidx = self.atlas.deepest_chart(x)
        for a in np.unique(aidx):
            chart = self.atlas.charts[a]
            rows = aidx == a
            xi = chart.to_chart(x[rows])
            out[rows] = chart.push(xi, self._fns[a](xi))
        return out


class SumField(VectorField):
    kind = "sum"

    def __init__(self, left: VectorField, right: VectorField, sign: float = 1.0):
        if left.manifold is not right.manifold:
            raise UsageError("cannot combine fields on different manifolds")
        super().__init__(left.manifold, left.atlas,
                         "%s%+g*%s" % (left.name, sign, right.name))
        self.left, self.right, self.sign = left, right, sign

    def eval_ambient(self, x):
        return self.left.eval_ambient(x) + self.sign * self.right.eval_ambient(x)

    def chart_components(self, chart, xi):
        return (self.left.chart_components(chart, xi)
                + self.sign * self.right.chart_components(chart, xi))

    def chart_jacobian(self, chart, xi, fd_step=FD_STEP):
        return (self.left.chart_jacobian(chart, xi, fd_step)
                + self.sign * self.right.chart_jacobian(chart, xi, fd_step))

    def singular_mask(self, x):
        return self.left.singular_mask(x) | self.right.singular_mask(x)


def difference(left: VectorField, right: VectorField) -> SumField:
    """The field X - Y, with Jacobians combined analytically where available."""
    return SumField(left, right, sign=-1.0)
