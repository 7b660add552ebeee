"""
Linear stability over cavity and mechanical damping
===================================================

Each branch is linearized into a four-mode drift matrix. A steady state is
stable when every eigenvalue of that matrix has a negative real part.
"""

#%%
import numpy as np

import levmirror as lm
from levmirror.linearization import stability

params = lm.SystemParams.reference()

for label in ("blue", "red"):
    model = lm.linearize(params, label)
    v = stability(model.A)
    print(f"{label:5s} Omega_M = {model.Omega_M:.4f}  g_C = {model.g_C:.4e}  "
          f"stable = {v.stable}  max Re = {v.max_real_part:+.3e}")

#%%
# Sweep a coarse (kappa, Gamma) grid. kappa changes the steady state itself,
# Gamma only enters the drift matrix.
kappas = np.geomspace(1e5, 1e9, 9)
Gammas = np.geomspace(1e2, 1e7, 11)

for label in ("blue", "red"):
    smap = lm.stability_map(params, kappas, Gammas, label)
    print(f"\n{label} branch, rows kappa, columns Gamma (+ stable, . unstable)")
    for k, row in zip(kappas, smap.stable):
        print(f"{k:9.2e}  " + "".join("+" if s else "." for s in row))

#%%
# The red branch only turns stable once the mechanical damping is large.
red = lm.linearize(params, "red")
for G in (1e4, 1e5, 1e6):
    print(G, stability(red.replace(Gamma=G).A).stable)
