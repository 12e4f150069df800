# Local operations and light cones on a random circuit
#
# A gate inserted outside a region's past light cone leaves the region's state
# unchanged. A gate inside it generally does not.

# %%
import numpy as np

from spacetime_states.dynamics import random_circuit
from spacetime_states.lattice import Lattice, Region
from spacetime_states.regions import no_signalling_check

rng = np.random.default_rng(5)
lat = Lattice(6, 3)
circuit = random_circuit(lat, rng)
probe = Region([0])
for site in range(1, 6):
    check = no_signalling_check(circuit, Region([site]), probe, lat.flat(3), rng=rng)
    print(f"gate on site {site}: distance {check.distance:.2e}", check.reason or "(spacelike)")
