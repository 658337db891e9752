"""Three views of one noisy qubit channel.

Build amplitude damping followed by depolarizing noise, then move between
Kraus operators, the Choi matrix and a Stinespring dilation, checking that
every view acts identically on a test state.
"""

import numpy as np

from pqc import (
    KrausChannel,
    apply_kraus,
    canonicalize,
    choi_from_kraus,
    kraus_from_choi,
    kraus_to_stinespring,
    stinespring_to_kraus,
    validate_cptp,
)
from pqc.channels import apply_stinespring, compose, kraus_weights
from pqc.noise import amplitude_damping_kraus, depolarizing_kraus

np.set_printoptions(precision=4, suppress=True)

# %% Compose two textbook channels
noisy = compose(amplitude_damping_kraus(0.3), depolarizing_kraus(0.03))
print("Kraus operators:", len(noisy))
print("CPTP residuals:", validate_cptp(noisy).checks)

# %% Choi matrix: eigenvalues are the canonical Kraus weights
choi = choi_from_kraus(noisy)
print("Choi spectrum:", np.linalg.eigvalsh(choi)[::-1])
print("canonical weights:", kraus_weights(canonicalize(noisy)))

# %% Any unitary remix of the Kraus set is the same channel
u = np.linalg.qr(np.random.default_rng(0).standard_normal((len(noisy),) * 2))[0]
remixed = KrausChannel(np.einsum("ab,bij->aij", u, noisy.operators))
print("remix keeps the Choi matrix:", np.allclose(choi_from_kraus(remixed), choi))

# %% Stinespring dilation and back
st = kraus_to_stinespring(noisy)
print(f"dilation: {st.system_qubits} system + {st.ancilla_qubits} ancilla qubits")

rho = np.array([[0.25, 0.3 - 0.1j], [0.3 + 0.1j, 0.75]])
views = {
    "kraus": apply_kraus(noisy, rho),
    "choi->kraus": apply_kraus(kraus_from_choi(choi), rho),
    "stinespring": apply_stinespring(st, rho),
    "stinespring->kraus": apply_kraus(stinespring_to_kraus(st), rho),
}
for name, out in views.items():
    print(f"{name:>20}: max deviation {np.max(np.abs(out - views['kraus'])):.1e}")
print(views["kraus"])
