"""The built-in field zoo: Killing rotations, gradient drifts, rough Sobolev drifts."""
from __future__ import annotations

import numpy as np

from ..errors import UsageError
from ..geometry.base import Manifold
from .base import AnalyticField, VectorField

S2, T2 = Manifold.SPHERE2, Manifold.TORUS2


def zero_field(manifold) -> AnalyticField:
    return AnalyticField(manifold, lambda x: np.zeros_like(x),
                         div_fn=lambda x: np.zeros(x.shape[0]), name="zero")


def killing_field(axis: int) -> AnalyticField:
    """Rotation generator about a coordinate axis on S^2; divergence-free."""
    e = np.zeros(3)
    e[axis] = 1.0

    def ambient(x):
        return np.cross(np.broadcast_to(e, x.shape), x)

    f = AnalyticField(S2, ambient, div_fn=lambda x: np.zeros(x.shape[0]),
                      name="killing_%s" % "xyz"[axis])
    f.rotation_axis = e
    return f


def constant_field(components) -> AnalyticField:
    """Constant-component field on the flat torus; divergence-free."""
    c = np.asarray(components, dtype=float)

    def ambient(x):
        return np.broadcast_to(c, x.shape).copy()

    f = AnalyticField(T2, ambient, div_fn=lambda x: np.zeros(x.shape[0]),
                      name="const(%g,%g)" % (c[0], c[1]))
    f.constant_components = c
    return f


class NoiseBundle:
    """Fused evaluation of sum_k w^k X_k and its divergence over a noise family.

    The generic bundle loops over the fields; linear families (rotation
    generators, constant fields) collapse to a single vectorized expression and
    report an identically-zero divergence as None so exact-zero density
    bookkeeping is preserved.
    """

    def __init__(self, fields):
        self.fields = list(fields)
        axes = [getattr(f, "rotation_axis", None) for f in self.fields]
        consts = [getattr(f, "constant_components", None) for f in self.fields]
        self._axis_mat = np.array(axes) if self.fields and all(
            a is not None for a in axes) else None
        self._const_mat = np.array(consts) if self.fields and all(
            c is not None for c in consts) else None

    def eval_sum(self, pts, w):
        if not self.fields:
            return np.zeros_like(pts)
        if self._axis_mat is not None:
            return np.cross(w @ self._axis_mat, pts)
        if self._const_mat is not None:
            return w @ self._const_mat
        total = self.fields[0].eval_ambient(pts) * w[:, 0:1]
        for j in range(1, len(self.fields)):
            total += self.fields[j].eval_ambient(pts) * w[:, j:j + 1]
        return total

    def div_sum(self, pts, w):
        """None when the family is divergence-free by construction."""
        if not self.fields or self._axis_mat is not None or self._const_mat is not None:
            return None
        total = None
        for j, f in enumerate(self.fields):
            dv = f.divergence_batch(pts, skip_singular=True) * w[:, j]
            total = dv if total is None else total + dv
        return total


def grad_height_field(scale: float = 1.0) -> AnalyticField:
    """Gradient of f(x) = scale * z on S^2: the compressible smooth drift.

    X = scale * (e3 - z x); div X = scale * laplacian z = -2 scale z.
    """
    def ambient(x):
        v = -x * x[:, 2:3]
        v[:, 2] += 1.0
        return scale * v

    return AnalyticField(S2, ambient, div_fn=lambda x: -2.0 * scale * x[:, 2],
                         name="grad_height")


def torus_sine_drift(amplitude: float = 1.0, with_analytic_div: bool = True) -> AnalyticField:
    """X = (amplitude * sin theta_1, 0) on T^2; div = amplitude * cos theta_1."""
    def ambient(x):
        out = np.zeros_like(x)
        out[:, 0] = amplitude * np.sin(x[:, 0])
        return out

    div = (lambda x: amplitude * np.cos(x[:, 0])) if with_analytic_div else None
    return AnalyticField(T2, ambient, div_fn=div, name="sine_drift")


def rough_sphere_drift(gamma: float) -> AnalyticField:
    """Bounded non-Lipschitz azimuthal drift u * K_z with u = |arcsin z|^gamma.

    The smooth rotation field K_z = (-y, x, 0) absorbs the pole degeneracy, so
    the only singular set is the equatorial cusp {z = 0}. The field is
    divergence-free (independent of the azimuth), lies in H^p_1 iff
    p*(1-gamma) < 1, and is Hoelder-gamma but not Lipschitz across the equator.
    """
    if not 0.0 < gamma < 1.0:
        raise UsageError("gamma must be in (0, 1)")

    def ambient(x):
        u = np.abs(np.arcsin(np.clip(x[:, 2], -1.0, 1.0))) ** gamma
        return u[:, None] * np.stack([-x[:, 1], x[:, 0], np.zeros(x.shape[0])], axis=1)

    def singular(x):
        return x[:, 2] == 0.0

    return AnalyticField(S2, ambient, div_fn=lambda x: np.zeros(x.shape[0]),
                         singular_fn=singular, name="rough_sphere(%g)" % gamma)


def rough_torus_drift(gamma: float) -> AnalyticField:
    """X = (|theta_1 - pi|^gamma, 0) on T^2, cusp on the circle {theta_1 = pi}."""
    if not 0.0 < gamma < 1.0:
        raise UsageError("gamma must be in (0, 1)")

    def ambient(x):
        out = np.zeros_like(x)
        out[:, 0] = np.abs(x[:, 0] - np.pi) ** gamma
        return out

    def div(x):
        w = x[:, 0] - np.pi
        with np.errstate(divide="ignore", invalid="ignore"):
            return gamma * np.abs(w) ** (gamma - 1.0) * np.sign(w)

    def singular(x):
        return x[:, 0] == np.pi

    return AnalyticField(T2, ambient, div_fn=div, singular_fn=singular,
                         name="rough_torus(%g)" % gamma)


# --- registry -------------------------------------------------------------------

def make_drift(manifold: Manifold, name: str, **params) -> VectorField:
    gamma = params.get("gamma", 0.6)
    scale = params.get("scale", 1.0)
    if name == "zero":
        return zero_field(manifold)
    if manifold is S2:
        if name == "rough":
            return rough_sphere_drift(gamma)
        if name == "grad_height":
            return grad_height_field(scale)
        if name.startswith("killing_"):
            return killing_field("xyz".index(name[-1]))
    else:
        if name == "rough":
            return rough_torus_drift(gamma)
        if name == "sine":
            return torus_sine_drift(scale)
        if name == "constant":
            return constant_field(params.get("components", (scale, 0.0)))
    raise UsageError("unknown drift %r on %s" % (name, manifold.value))


def make_noise(manifold: Manifold, name: str, **params) -> list[VectorField]:
    if name == "none":
        return []
    if manifold is S2 and name == "killing":
        return [killing_field(k) for k in range(3)]
    if manifold is T2 and name == "constant":
        return [constant_field((1.0, 0.0)), constant_field((0.0, 1.0))]
    raise UsageError("unknown noise family %r on %s" % (name, manifold.value))
