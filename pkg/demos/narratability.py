# Same flat history, different staircase history
#
# Scenario A leaves a singlet alone. Scenario B flips both spins at the same
# layer. Flat slices cannot tell them apart; a slice through one flip can.

# %%
from spacetime_states.scenarios import narratability_demo
from spacetime_states.report import emit_csv

rep = narratability_demo(separation=2, n_layers=2, flip_layer=1)
print("flat distances:     ", [round(d, 12) for d in rep.flat_distances])
print("staircase distances:", [round(d, 12) for d in rep.staircase_distances])

# %% [markdown]
# The divergent surface holds |phi+> in scenario B. Its trace distance from the
# singlet is 1 because the two states are orthogonal.

# %%
print(rep.divergent_state.matrix.real.round(3))
print(emit_csv(rep.staircase_distances))
