"""Does an entangled reference system reveal more error?

Feeding half of an entangled state into the channel can only raise the
worst-case distance. Here we measure by how much for the mixed CNOT at its
optimum, and for a pair of channels where entanglement matters a lot.
"""

import numpy as np

from pqc import AscentConfig, KrausChannel, NoiseSpec, cnot_mixture, diamond_distance, ideal_cnot
from pqc.noise import X, Z

cfg = AscentConfig(seed=7)

# %% Identity against a full depolarizer: entanglement helps a lot
depol = KrausChannel(np.array([np.eye(2), X, 1j * X @ Z, Z]) / 2)
res = diamond_distance(KrausChannel.identity(2), depol, cfg)
for ev in res.per_m:
    print(f"identity vs depolarizer, ancilla dim {ev.ext_dim}: {ev.value:.4f}")

# %% Mixed CNOT near its min-max weight
family = cnot_mixture(NoiseSpec.asymmetric())
res = diamond_distance(ideal_cnot(), family([0.56]), cfg)
for ev in res.per_m:
    print(f"mixed CNOT (w1=0.56), ancilla dim {ev.ext_dim}: {ev.value:.6f}  converged={ev.converged}")
gap = res.per_m[1].value - res.per_m[0].value
print(f"gain from one ancilla qubit: {gap:.2e}")
print("a second ancilla qubit adds nothing:", abs(res.per_m[-1].value - res.per_m[1].value) < 1e-8)
