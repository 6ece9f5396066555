"""Stratonovich flows in charts, density bookkeeping, Wong-Zakai comparison.

Run:  python demos/03_flows_and_densities.py
"""
import numpy as np

from manistoch.fields import grad_height_field, make_noise, rough_sphere_drift
from manistoch.flow import make_driver, simulate_backward, simulate_flow, wong_zakai_flow
from manistoch.geometry import Manifold, ManifoldPoint
from manistoch.geometry import sphere as sphere_geom

S2 = Manifold.SPHERE2
x0 = ManifoldPoint(S2, [1.0, 0.0, 0.0])
noise = make_noise(S2, "killing")

# Divergence-free everything: the density is identically one, to the bit.
d = make_driver(m=3, T=1.0, n_steps=1000, seed=7)
rec = simulate_flow(x0, rough_sphere_drift(0.6), noise, d, record_stride=100)
print("rough divergence-free drift: max |log rho| =", np.abs(rec.log_density_path).max())

# A compressible drift accumulates a genuine density.
drift = grad_height_field()
rec = simulate_flow(x0, drift, noise, d, record_stride=100)
print("gradient drift: rho_T =", float(np.exp(rec.log_density_path[-1])))

# The backward flow driven by W^T_t = W_{T-t} - W_T inverts the forward one.
back = simulate_backward(ManifoldPoint(S2, rec.positions[-1]), drift, noise, d)
print("backward-of-forward inversion error:",
      float(sphere_geom.dist(back.positions[-1], x0.coords)))

# Wong-Zakai: the piecewise-linear random ODE converges to the Stratonovich
# flow as the interpolation refines (strong rate ~ 1/2).
ref = simulate_flow(x0, drift, noise, make_driver(3, 1.0, 1024, seed=9))
print("\nlevel   endpoint distance to the fine-grid flow")
for level in (8, 32, 128):
    dl = make_driver(3, 1.0, 1024, seed=9, wz_level=level)
    wz = wong_zakai_flow(x0, drift, noise, dl)
    print("%5d   %.5f" % (level, float(sphere_geom.dist(wz.positions[-1],
                                                        ref.positions[-1]))))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig = plt.figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="3d")
    p = rec.positions
    ax.plot(p[:, 0], p[:, 1], p[:, 2], lw=1.0)
    ax.set_title("one flow path on the sphere")
    fig.savefig("demos/flow_path.png", dpi=120)
    print("\nwrote demos/flow_path.png")
except ImportError:
    pass
