# %% [markdown]
# # Thermodynamics of the cavity field
#
# The coherent-state partition function reduces to a one-dimensional integral
# over the Landau potential phi(x). At low temperature it is dominated by the
# minima of phi, which is what the Laplace estimate captures.

# %%
from tbcavity import ModelParams
from tbcavity.landau import critical_points, partition_function

p = ModelParams(g=1.62, k0=4.13, L=510)
for cp in critical_points(p):
    kind = "min" if cp.is_minimum else "max"
    print(f"x* = {cp.x_star:+9.5f}  phi = {cp.phi_value:12.6f}  phi'' = {cp.phi_curvature:9.5f}  {kind}")

# %% [markdown]
# Z itself overflows a double, so it is carried as log Z.

# %%
for beta in (1.0, 4.0, 16.0, 64.0):
    r = partition_function(p, beta=beta)
    print(f"beta={beta:5.1f}  log Z={r.log_Z_numeric:14.6f}  Laplace gap={r.relative_gap:.3e}  F={r.free_energy:.6f}")
