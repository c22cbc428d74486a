# %% [markdown]
# # Equilibria of the cavity field
#
# The mean-field cavity quadrature X obeys a pendulum-like force balance,
# omega0 X + 2 t_h c R sin(cX + delta) = 0. How many solutions exist depends
# on the coupling g and on where the Fermi sea is centred (k0).

# %%
import math

import numpy as np

from tbcavity import ModelParams
from tbcavity.meanfield import find_fixed_points, phase_region, weak_coupling_bound
from tbcavity.sweep import phase_grid

# %% [markdown]
# One parameter point deep in the multistable regime.

# %%
p = ModelParams(g=2.5, k0=math.pi, L=510)
for fp in find_fixed_points(p):
    print(f"X* = {fp.X_star:+10.5f}  {fp.stability.value:7s}  omega = {fp.omega_fluct}")

# %% [markdown]
# Below g = sqrt(pi omega0 / 4 t_h) there is exactly one equilibrium for every k0.

# %%
print("single-equilibrium bound:", weak_coupling_bound(p).g_max)
for g, k0 in [(0.5, 0.0), (1.5, math.pi / 2), (2.5, math.pi), (3.0, 3 * math.pi / 2)]:
    r = phase_region(ModelParams(g=g, k0=k0, L=510))
    print(f"g={g:4.2f} k0={k0:5.3f}: {r.n_equilibria} equilibria, {r.n_centers} centers -> {r.region_label}")

# %% [markdown]
# A coarse phase diagram, printed as a character map (rows: g, columns: k0).

# %%
grid = phase_grid((0.0, 3.5, 15), (0.0, 2 * math.pi, 30), ModelParams(L=510))
labels = np.array([r["region_label"] for r in grid.rows]).reshape(15, 30)
for g, row in zip(np.linspace(0, 3.5, 15), labels):
    print(f"{g:4.2f} " + "".join(s if s != "Other" else "+" for s in row))
