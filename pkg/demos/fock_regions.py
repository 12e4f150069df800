# Region-by-region factorization of a truncated Fock space
#
# Modes are grouped into regions. A joint occupation vector splits into one
# occupation vector per region, which maps the joint space isometrically into
# the product of the region spaces.

# %%
import numpy as np

from spacetime_states import RegionFactorization, RegionPartition, TruncatedFockSpace, embed_first_quantized

space = TruncatedFockSpace(RegionPartition(["left", "right"], [1, 1]), cutoff=2)
iso = RegionFactorization(space)
for occ in space.basis:
    print(occ, "->", iso.map_occupation(occ))

# %% [markdown]
# A single particle spread over both regions becomes an entangled state of the
# two region factors.

# %%
psi, iso = embed_first_quantized(np.array([1, 1]) / np.sqrt(2), RegionPartition(["left", "right"], [1, 1]))
print(psi.amplitudes.real.round(3))
