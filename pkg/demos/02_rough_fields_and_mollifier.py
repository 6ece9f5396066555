"""The rough drift family and its partition-of-unity mollification.

Run:  python demos/02_rough_fields_and_mollifier.py
"""
import numpy as np

from manistoch.fields import (difference_norm_1p, mollify, rough_sphere_drift,
                              sobolev_norms)
from manistoch.geometry import Manifold, ManifoldPoint

gamma, p = 0.6, 1.5
X = rough_sphere_drift(gamma)

# Bounded and divergence-free, but only Hoelder across the equator: the
# covariant derivative blows up like |z|^(gamma-1) there.
for z in (0.5, 0.05, 0.005):
    pt = ManifoldPoint(Manifold.SPHERE2, [np.sqrt(1 - z * z), 0.0, z])
    print("z=%6.3f  |X| = %.4f   |nabla X| = %10.3f"
          % (z, X.eval(pt).norm, X.cov_deriv_norm(pt)))

# Sobolev norms by Monte Carlo: finite for p(1-gamma) < 1.
rep = sobolev_norms(X, p=p, quadrature_n=50_000, rng_seed=0)
print("||X||_p = %.4f   ||X||_{1,p} = %.4f   (p(1-gamma) = %.2f)"
      % (rep.l_p_norm, rep.w1p_norm, p * (1 - gamma)))

# Mollification error in the (1,p)-norm: decreasing, at the cusp-limited rate
# n^-(1-p(1-gamma))/p ~ n^-0.267.
print("\n  n    ||X - X_n||_{1,p}")
prev = None
for n in (4, 8, 16, 32, 64):
    err = difference_norm_1p(X, mollify(X, n), p=p, quadrature_n=10_000,
                             rng_seed=1).w1p_norm
    mark = "" if prev is None else "  (x %.3f)" % (err / prev)
    print("%3d    %.4f%s" % (n, err, mark))
    prev = err
