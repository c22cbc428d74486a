# %% [markdown]
# # Exact photon ground states
#
# With the Fermi sea frozen, the photon Hamiltonian is diagonalised in a
# truncated Fock basis. At k0 = 0 it only contains even functions of the
# vector potential, so the ground state has even photon numbers only.

# %%
import math

from tbcavity import ModelParams
from tbcavity.fock import TruncatedBasis, converged_ground_state, ground_state, number_state_band, photon_distribution
from tbcavity.meanfield import find_fixed_points

gs = ground_state(TruncatedBasis(30), ModelParams(g=1.62, k0=0.0, L=510))
print(gs.summary())
for n, P, logP in photon_distribution(gs)[:10]:
    print(n, f"{P:.3e}", "absent" if logP is None else f"{logP:.3f}")

# %% [markdown]
# Away from k0 = 0 the field is displaced; the mean quadrature tracks the
# mean-field equilibrium, and the basis grows until the state is converged.

# %%
p = ModelParams(g=0.8, k0=math.pi / 2, L=510)
gs = converged_ground_state(p)
print("n_max used:", gs.n_max, " <X> =", gs.X_mean, " mean-field X* =", find_fixed_points(p)[0].X_star)

# %% [markdown]
# Energy per site of number states |n> against the band centre k0.

# %%
k0 = [0.0, math.pi / 2, math.pi]
for n in (0, 1, 5):
    print(n, number_state_band(n, k0, ModelParams(g=3.0, L=100)))
