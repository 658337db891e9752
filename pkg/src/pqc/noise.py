"""Single-qubit noise channels and the two noisy CNOT realizations.

Parameter conventions follow the usual emulator definitions: depolarizing ``p``
keeps the state with probability ``1 - p`` and applies each Pauli with
probability ``p / 3``; amplitude damping ``gamma`` is the decay probability
``|1> -> |0>``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelEnsemble, KrausChannel, canonicalize, compose, tensor

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

#: CNOT with control on qubit 0 (leftmost) and target on qubit 1.
CNOT_01 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
#: CNOT with control on qubit 1 and target on qubit 0.
CNOT_10 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)

NOISE_ORDERS = ("depol_first", "damp_first")


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def depolarizing_kraus(p: float) -> KrausChannel:
    p = _check_prob("depolarizing p", p)
    return KrausChannel([np.sqrt(1 - p) * I2, np.sqrt(p / 3) * X, np.sqrt(p / 3) * Y, np.sqrt(p / 3) * Z])


def amplitude_damping_kraus(gamma: float) -> KrausChannel:
    gamma = _check_prob("amplitude damping gamma", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel([k0, k1])


@dataclass(frozen=True)
class QubitNoise:
    depolarizing: float = 0.0
    amplitude_damping: float = 0.0

    def __post_init__(self):
        _check_prob("depolarizing", self.depolarizing)
        _check_prob("amplitude_damping", self.amplitude_damping)


@dataclass(frozen=True)
class NoiseSpec:
    """Per-qubit noise parameters plus the order of the two channels in a layer."""

    qubits: tuple = field(default_factory=lambda: (QubitNoise(), QubitNoise()))
    noise_order: str = "depol_first"

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if not self.qubits:
            raise ValueError("noise spec needs at least one qubit")
        if self.noise_order not in NOISE_ORDERS:
            raise ValueError(f"noise_order must be one of {NOISE_ORDERS}, got {self.noise_order!r}")

    @classmethod
    def asymmetric(cls) -> NoiseSpec:
        """Asymmetric defaults: qubit 0 (p=0.01, gamma=0.05), qubit 1 (p=0.03, gamma=0.3)."""
        return cls((QubitNoise(0.01, 0.05), QubitNoise(0.03, 0.3)))

    @classmethod
    def noiseless(cls, n_qubits: int = 2) -> NoiseSpec:
        return cls(tuple(QubitNoise() for _ in range(n_qubits)))

    @classmethod
    def from_dict(cls, data: dict) -> NoiseSpec:
        unknown = set(data) - {"qubits", "noise_order"}
        if unknown:
            raise ValueError(f"unknown noise keys: {sorted(unknown)}")
        qubits = []
        for q in data.get("qubits", []):
            extra = set(q) - {"depolarizing", "amplitude_damping"}
            if extra:
                raise ValueError(f"unknown qubit noise keys: {sorted(extra)}")
            qubits.append(QubitNoise(q.get("depolarizing", 0.0), q.get("amplitude_damping", 0.0)))
        return cls(tuple(qubits), data.get("noise_order", "depol_first"))

    def to_dict(self) -> dict:
        return {
            "qubits": [{"depolarizing": q.depolarizing, "amplitude_damping": q.amplitude_damping} for q in self.qubits],
            "noise_order": self.noise_order,
        }


class GateVariant(enum.Enum):
    DIRECT = "direct"
    HADAMARD_CONJUGATED = "hadamard_conjugated"


def ideal_cnot() -> KrausChannel:
    return KrausChannel.unitary(CNOT_01)


def variant_unitary(variant: GateVariant) -> np.ndarray:
    """Noiseless gate sequence of a variant, composed into one matrix."""
    variant = GateVariant(variant)
    if variant is GateVariant.DIRECT:
        return CNOT_01
    hh = np.kron(H, H)
    return hh @ CNOT_10 @ hh


def qubit_noise_channel(q: QubitNoise, order: str = "depol_first") -> KrausChannel:
    depol = depolarizing_kraus(q.depolarizing)
    damp = amplitude_damping_kraus(q.amplitude_damping)
    if order == "depol_first":
        return compose(depol, damp)
    return compose(damp, depol)


def noise_layer(spec: NoiseSpec) -> KrausChannel:
    """Independent single-qubit noise on every qubit, canonicalised."""
    per_qubit = [qubit_noise_channel(q, spec.noise_order) for q in spec.qubits]
    return canonicalize(tensor(*per_qubit))


@functools.lru_cache(maxsize=64)
def build_cnot_variant(variant: GateVariant, spec: NoiseSpec) -> KrausChannel:
    """Noise layer, then the (noiseless-single-qubit) CNOT realization, then noise again.

    ``DIRECT`` is ``CNOT(0 -> 1)``; ``HADAMARD_CONJUGATED`` is
    ``(H (x) H) CNOT(1 -> 0) (H (x) H)``. Hadamards carry no noise, so only the
    entangling gate is sandwiched between noise layers.
    """
    if len(spec.qubits) != 2:
        raise ValueError(f"CNOT variants need a 2-qubit noise spec, got {len(spec.qubits)} qubits")
    variant = GateVariant(variant)
    layer = noise_layer(spec)
    if variant is GateVariant.DIRECT:
        return compose(compose(layer, KrausChannel.unitary(CNOT_01)), layer)
    hh = KrausChannel.unitary(np.kron(H, H))
    core = compose(compose(layer, KrausChannel.unitary(CNOT_10)), layer)
    return compose(compose(hh, core), hh)


def mixed_cnot_channel(w1: float, spec: NoiseSpec) -> ChannelEnsemble:
    """``w1 * Direct + (1 - w1) * HadamardConjugated``."""
    w1 = _check_prob("w1", w1)
    return ChannelEnsemble(
        [
            (w1, build_cnot_variant(GateVariant.DIRECT, spec)),
            (1.0 - w1, build_cnot_variant(GateVariant.HADAMARD_CONJUGATED, spec)),
        ]
    )
