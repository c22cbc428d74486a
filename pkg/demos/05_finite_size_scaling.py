# %% [markdown]
# # Photon number against system size
#
# Fit <n> = A L^alpha over chain lengths L. Outside the displaced phase the
# photon number stays tiny and flat; inside it grows roughly linearly in L.

# %%
import math

from tbcavity import ModelParams
from tbcavity.sweep import scaling_scan

sizes = [60, 120, 240, 480]
for g, k0 in [(0.5, 0.0), (1.5, math.pi / 2), (2.5, math.pi), (3.0, 3 * math.pi / 2)]:
    fit = scaling_scan(sizes, ModelParams(g=g, k0=k0))
    print(f"g={g} k0={k0:.3f}: <n>={['%.4g' % n for n in fit.n_means]}  alpha={fit.alpha:.4f}  r2={fit.r_squared:.6f}")
