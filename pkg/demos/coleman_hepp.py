# A spin passing along a chain of pointer qubits
#
# Each region holds an occupation state |n_up, n_down>. The moving spin sits in
# whichever region is doubly occupied. When it passes on, it leaves that
# region's qubit flipped if the spin was down.

# %%
import numpy as np

from spacetime_states import ColemanHeppParams, coleman_hepp

for n in (3, 5, 8):
    rep = coleman_hepp(ColemanHeppParams(n))
    print(n, "weights", np.round(rep.weights, 12), "residual", rep.decomposition.residual)

# %% [markdown]
# Unequal amplitudes give unequal weights. The recorded qubits end up in a
# mixture of all-up and all-down with no coherence between them.

# %%
rep = coleman_hepp(ColemanHeppParams(4, 0.6, 0.8j))
print(rep.weights)
print(np.round(np.diag(rep.rho_a.matrix).real, 3))
