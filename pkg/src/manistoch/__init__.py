"""manistoch: stochastic flows with rough drifts on S^2 and T^2.

Geometry kernel (atlases, geodesics, parallel transport), a vector-field zoo
with chart-wise mollification, local Hardy-Littlewood maximal functions, a
Stratonovich flow integrator with quasi-invariance densities, and a suite of
Monte-Carlo verification experiments behind the ``manistoch`` CLI.
"""

__version__ = "0.1.0"

from .geometry import Manifold, ManifoldPoint, TangentVector  # noqa: F401
