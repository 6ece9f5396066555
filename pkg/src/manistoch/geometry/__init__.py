from .base import Manifold, ManifoldPoint, TangentVector
from .atlas import Atlas, build_atlas, default_atlas
from .geodesics import (GeodesicSegment, distance, grad_dist, grad_dist_sq,
                        minimizing_geodesic, parallel_transport, transport_batch)
from .shooting import chart_shooting_distance, shooting_distance_batch
from .sampling import sample_pairs_within, sample_uniform, sample_uniform_batch
from .certify import CertificationReport, certify_atlas
from .ops import chart_of, midpoint, partition_weights

__all__ = [
    "Manifold", "ManifoldPoint", "TangentVector",
    "Atlas", "build_atlas", "default_atlas",
    "GeodesicSegment", "distance", "grad_dist", "grad_dist_sq",
    "minimizing_geodesic", "parallel_transport", "transport_batch",
    "chart_shooting_distance", "shooting_distance_batch",
    "sample_pairs_within", "sample_uniform", "sample_uniform_batch",
    "CertificationReport", "certify_atlas",
    "chart_of", "midpoint", "partition_weights",
]
