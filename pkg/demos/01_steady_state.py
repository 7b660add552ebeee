"""
Steady states of a levitated cavity mirror
==========================================

Radiation pressure from the intracavity field holds the top mirror up against
gravity. Above a threshold input power there are two equilibria, one on each
side of the cavity resonance.
"""

#%%
import numpy as np

import levmirror as lm

params = lm.SystemParams.reference()
print(params)

#%%
# The threshold is where the two branches merge at zero detuning.
p_min = lm.threshold_power(params)
print("threshold P~ =", p_min)

#%%
blue, red = lm.solve_branches(params)
for br in (blue, red):
    print(f"{br.label.value:5s} q = {br.q:.6e} m  N_c = {br.N_c:.4e}  Delta = {br.Delta:+.6e} rad/s")

# the force balance should close to rounding error
print(lm.residual(blue, params))

#%%
# The branch detuning shrinks towards zero as the power approaches threshold.
for p in p_min * np.array([1.0001, 1.01, 1.5, 3.0]):
    b = lm.steady_state(params.replace(p_tilde=p), "blue")
    print(f"P~ = {p:.4e}   Delta = {b.Delta:+.4e}")

#%%
# Below threshold there is no real solution.
try:
    lm.solve_branches(params.replace(p_tilde=0.5 * p_min))
except lm.NoRealSteadyState as exc:
    print("no steady state:", exc)
