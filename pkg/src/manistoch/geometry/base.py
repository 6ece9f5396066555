"""Core point and tangent-vector types for the two built-in manifolds."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError

TWO_PI = 2.0 * np.pi

SPHERE_NORM_TOL = 1e-12
TANGENCY_TOL = 1e-10


class Manifold(enum.Enum):
    SPHERE2 = "sphere2"
    TORUS2 = "torus2"

    @property
    def ambient_dim(self):
        return 3 if self is Manifold.SPHERE2 else 2

    @property
    def volume(self):
        """Total Riemannian volume: 4*pi for the unit sphere, (2*pi)^2 for the flat torus."""
        return 4.0 * np.pi if self is Manifold.SPHERE2 else TWO_PI ** 2

    @property
    def diameter(self):
        return np.pi if self is Manifold.SPHERE2 else np.pi * np.sqrt(2.0)

    @property
    def injectivity_radius(self):
        return np.pi


def normalize_coords(manifold: Manifold, coords) -> np.ndarray:
    """Project raw coordinates onto the canonical representation.

    Sphere points are renormalized to unit length, torus angles reduced
    into [0, 2*pi). Accepts a single point or a batch (last axis = coords).
    """
    c = np.asarray(coords, dtype=float)
    if manifold is Manifold.SPHERE2:
        if c.shape[-1] != 3:
            raise UsageError("sphere point needs 3 coordinates, got %r" % (c.shape,))
        norm = np.linalg.norm(c, axis=-1, keepdims=True)
        if np.any(norm < 1e-8):
            raise UsageError("sphere point too close to the origin to normalize")
        # idempotent: leave already-unit vectors bit-identical
        if np.all(np.abs(norm - 1.0) < 4e-16):
            return c.copy() if c is coords else c
        return c / norm
    if c.shape[-1] != 2:
        raise UsageError("torus point needs 2 angles, got %r" % (c.shape,))
    c = np.mod(c, TWO_PI)
    # np.mod(-tiny, 2*pi) rounds up to exactly 2*pi; fold back to 0
    return np.where(c >= TWO_PI, 0.0, c)


@dataclass(frozen=True)
class ManifoldPoint:
    """A point on S^2 (unit 3-vector) or T^2 (angle pair in [0, 2*pi))."""

    manifold: Manifold
    coords: np.ndarray = field(repr=True)

    def __post_init__(self):
        object.__setattr__(self, "coords", normalize_coords(self.manifold, self.coords))
        if self.coords.ndim != 1:
            raise UsageError("ManifoldPoint holds a single point; use arrays for batches")

    def __eq__(self, other):
        if not isinstance(other, ManifoldPoint):
            return NotImplemented
        return self.manifold is other.manifold and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.manifold, self.coords.tobytes()))


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector at ``base``; sphere components are constrained tangent 3-vectors."""

    base: ManifoldPoint
    components: np.ndarray

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=float)
        if comp.shape != (self.base.manifold.ambient_dim,):
            raise UsageError("tangent components shape %r does not match manifold" % (comp.shape,))
        if self.base.manifold is Manifold.SPHERE2:
            # project out any radial part, then enforce the tangency invariant
            radial = float(np.dot(self.base.coords, comp))
            if abs(radial) > 1e-6:
                raise UsageError("components are far from the tangent space (radial part %g)" % radial)
            comp = comp - radial * self.base.coords
        object.__setattr__(self, "components", comp)

    @property
    def norm(self) -> float:
        """Riemannian length; both built-in metrics are Euclidean on ambient components."""
        return float(np.linalg.norm(self.components))

    def __add__(self, other):
        if not isinstance(other, TangentVector) or other.base != self.base:
            raise UsageError("can only add tangent vectors at the same base point")
        return TangentVector(self.base, self.components + other.components)

    def __mul__(self, scalar):
        return TangentVector(self.base, self.components * float(scalar))

    __rmul__ = __mul__


def require_same_manifold(x: ManifoldPoint, y: ManifoldPoint) -> Manifold:
    if x.manifold is not y.manifold:
        raise UsageError("points live on different manifolds: %s vs %s"
                         % (x.manifold.value, y.manifold.value))
    return x.manifold


def wrap_angles(theta):
    """Reduce angles mod 2*pi into [0, 2*pi)."""
    t = np.mod(theta, TWO_PI)
    return np.where(t >= TWO_PI, 0.0, t)


def angle_diff(a, b):
    """Signed wrapped difference a - b in (-pi, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi
    return np.where(d == -np.pi, np.pi, d)
