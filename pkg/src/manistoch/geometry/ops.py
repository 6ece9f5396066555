"""Spec-level scalar operations built on the batched kernels."""
from __future__ import annotations

import numpy as np

from .atlas import Atlas, default_atlas
from .base import ManifoldPoint, require_same_manifold


def partition_weights(x: ManifoldPoint, atlas: Atlas | None = None):
    """(chart id, psi_alpha(x)) for every chart with nonzero weight."""
    if atlas is None:
        atlas = default_atlas(x.manifold)
    psi = atlas.partition(x.coords[None, :])[0]
    return [(c.id, float(psi[i])) for i, c in enumerate(atlas.charts) if psi[i] > 0.0]


def chart_of(x: ManifoldPoint, atlas: Atlas | None = None):
    """The deepest chart containing x (always exists on the built-in atlases)."""
    if atlas is None:
        atlas = default_atlas(x.manifold)
    return atlas.charts[int(atlas.deepest_chart(x.coords))]


def midpoint(x: ManifoldPoint, y: ManifoldPoint) -> ManifoldPoint:
    from . import sphere, torus
    from .base import Manifold
    m = require_same_manifold(x, y)
    geom = sphere if m is Manifold.SPHERE2 else torus
    p = geom.geodesic_points(x.coords, y.coords, np.array([0.5]))[0]
    return ManifoldPoint(m, p)
