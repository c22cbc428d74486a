# %% [markdown]
# # Trajectories, fluctuations and the J0-averaged energy
#
# Around a stable center the quadratures oscillate. The energy is conserved
# by the flow, small deviations oscillate at omega = sqrt(omega0 E''), and the
# matter energy averaged over a period is reduced by J0 of the oscillation
# amplitude.

# %%
import numpy as np

from tbcavity import ModelParams
from tbcavity.meanfield import (
    QuadratureState,
    Stability,
    energy,
    evolve,
    evolve_fluctuation,
    find_fixed_points,
    mean_energy_density,
)

# %%
p = ModelParams(g=1.62, k0=4.13, L=510)
traj = evolve(QuadratureState(5.0, 0.5), p, t_end=100.0, dt=1e-3)
E = energy(traj, p)
print("relative energy drift over t = 100:", np.max(np.abs(E - E[0])) / abs(E[0]))

# %% [markdown]
# Linear fluctuations about a center follow a harmonic oscillator.

# %%
center = next(fp for fp in find_fixed_points(p) if fp.stability is Stability.CENTER)
rest = evolve(QuadratureState(center.X_star, 0.0), p, t_end=20.0)
dX, _ = evolve_fluctuation(rest, p, deltaX0=1.0, deltaV0=0.0)
print("max |dX - cos(omega t)|:", np.max(np.abs(dX - np.cos(center.omega_fluct * rest.t))))

# %% [markdown]
# Small oscillation about X* = 0 at k0 = 0: time average against the Bessel prediction.

# %%
q = ModelParams(g=1.0, k0=0.0, L=510)
for X0 in (2.0, 5.0, 8.0):
    res = mean_energy_density(evolve(QuadratureState(X0, 0.0), q, t_end=60.0), q)
    print(f"R0={res.R0:.4f}  <E>={res.time_average:.10f}  J0 prediction={res.bessel_prediction:.10f}")
