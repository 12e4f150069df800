# Two particles, two events, three foliations
#
# Two spin-1/2 particles start in a|0>|1> + b|1>|0> on a three-site lattice.
# Each particle receives one event at the same layer. The events are spacelike
# separated, so there are two ways to slice between them.

# %%
import numpy as np

from spacetime_states import EPRParams, FRC, epr_scenario
from spacetime_states.scenarios import EPRGeometry

geom = EPRGeometry.build(2)
for name, sigma in geom.surfaces.items():
    print(name, sigma.to_list())

# %% [markdown]
# With spin flips as the events, every particle region gets the same state
# whichever surface it is viewed from. The pair is still entangled, so the
# joint state is not fixed by the two single-particle states.

# %%
a, b = 0.6, 0.8
unitary = epr_scenario(EPRParams(a, b))
for name, per_surface in unitary.region_states.items():
    print(name, {s: np.round(np.diag(rho.matrix).real, 3) for s, rho in per_surface.items()})
print("level:", unitary.hierarchy.level)

# %% [markdown]
# Swap the flips for measurements and fix particle 1's outcome to 0. Particle 2
# on the flat surface still has a mixed state, but on the surface that lies
# after particle 1's measurement it is already |1><1|.

# %%
collapse = epr_scenario(EPRParams(a, b, mode=FRC, outcome=0))
s2 = collapse.consistency["S2"]
for surface, rho in s2.distinct_states:
    print(surface.to_list(), np.round(np.diag(rho.matrix).real, 3))
print("branch weight:", collapse.branch_weight)
print("level:", collapse.hierarchy.level)
