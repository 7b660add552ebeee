"""
Quadrature variances of the mirror output
=========================================

Diagonal entries of the sideband covariance give the spectral variances of
each output quadrature. Vacuum sits at 1/2.
"""

#%%
import numpy as np

import levmirror as lm

params = lm.SystemParams.reference()
model = lm.linearize(params, "blue")
omegas = np.geomspace(1e-2 * model.Omega_M, 1e3 * model.g_C, 400)

sigma = lm.sideband_covariance(model, omegas)
var = lm.quadrature_variances(sigma, rtol=1e-8)
k = int(np.argmin(var.Q_b))
print(f"min Var(Q_b) = {var.Q_b[k]:.4f} at omega = {omegas[k]:.4e} rad/s")
print(f"Var(P_b) there = {var.P_b[k]:.4e}")

#%%
# The diagonal hides a strong Q-P correlation: the mirror block's smallest
# eigenvalue lies far below its smallest diagonal entry.
hp = lm.sideband_covariance(model, omegas[k], dps=30)
sb, sa, _ = lm.submatrices(hp.sigma_hp)
lo, hi = lm.max_squeezing(sb)
print(f"sigma_b eigenvalues span [{lo:.4e}, {hi:.4e}]")

#%%
# Cavity output variances across the same grid.
print("Var(Q_a) range:", var.Q_a.min(), var.Q_a.max())
print("Var(P_a) range:", var.P_a.min(), var.P_a.max())
