"""Dense linear algebra for multi-qubit density matrices.

Matrices and states are plain complex ``numpy`` arrays. Basis ordering is
big-endian: tensor factor 0 is the leftmost factor of a Kronecker product, so
for two qubits ``|q0 q1>`` has flat index ``2*q0 + q1``. Extension and ancilla
factors are always prepended, i.e. layouts read ``[ext, sys_0, sys_1, ...]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class ValidationError(ValueError):
    """An object violates its mathematical contract beyond tolerance."""


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed on ``(seed, *keys)``.

    Child streams for restarts, grid points, etc. are obtained by appending
    integer keys, so every random draw is a pure function of its key path.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, leftmost factor first."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def projector(psi: np.ndarray) -> np.ndarray:
    """``|psi><psi|`` for a state vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def basis_state(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def _check_layout(dim: int, layout: Sequence[int]) -> tuple[int, ...]:
    layout = tuple(int(f) for f in layout)
    if any(f < 1 for f in layout):
        raise DimensionError(f"layout factors must be >= 1, got {layout}")
    if int(np.prod(layout)) != dim:
        raise DimensionError(f"layout {layout} does not factor dimension {dim}")
    return layout


def partial_trace(rho: np.ndarray, layout: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` onto the factors listed in ``keep``.

    Parameters
    ----------
    rho : ndarray
        Square operator on the space described by ``layout``.
    layout : sequence of int
        Subsystem dimensions, e.g. ``[m, 2, 2]``. Factors of size 1 are allowed.
    keep : sequence of int
        Indices of the factors to keep; returned in ascending order.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    layout = _check_layout(rho.shape[0], layout)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(layout):
        raise DimensionError(f"keep {keep} out of range for {len(layout)} factors")

    n = len(layout)
    tensor = rho.reshape(layout + layout)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(tensor, row + col, out)
    d_keep = int(np.prod([layout[i] for i in keep]))
    return reduced.reshape(d_keep, d_keep)


def is_hermitian(h: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    h = np.asarray(h)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and np.max(np.abs(h - dagger(h)), initial=0.0) <= tol


def hermitian_spectrum(h: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues non-increasing.

    Returns ``(evals, evecs)`` with ``h == evecs @ diag(evals) @ evecs^dagger``.
    Raises ``ValidationError`` if ``h`` is not Hermitian within ``tol``.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValidationError("matrix is not Hermitian within tolerance")
    evals, evecs = np.linalg.eigh(0.5 * (h + dagger(h)))
    return evals[::-1].copy(), evecs[:, ::-1].copy()


def haar_random_pure_states(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random unit vectors of length ``dim`` as an ``(n, dim)`` array."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def haar_random_pure_state(dim: int, seed: int) -> np.ndarray:
    """Haar-random pure state, a deterministic function of ``(dim, seed)``."""
    return haar_random_pure_states(1, dim, rng_for(seed))[0]


def haar_random_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = rng_for(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


@dataclass(frozen=True)
class ValidationReport:
    """Residuals of a validity check; truthy iff every residual is within ``tol``."""

    checks: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.checks.values())

    def __bool__(self) -> bool:
        return self.passed

    def failures(self) -> dict:
        return {k: v for k, v in self.checks.items() if v > self.tol}

    def as_dict(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, "residuals": dict(self.checks)}


def validate_density_matrix(rho: np.ndarray, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check Hermiticity, positivity and unit trace of ``rho``.

    Residuals are reported as non-negative violations: ``hermiticity`` is the
    max-abs deviation from ``rho^dagger``, ``negativity`` is ``max(0, -lambda_min)``
    and ``trace`` is ``|Tr rho - 1|``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or not np.all(np.isfinite(rho)):
        return ValidationReport({"shape": np.inf}, tol)
    herm = float(np.max(np.abs(rho - dagger(rho)), initial=0.0))
    lam_min = float(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0])
    checks = {
        "hermiticity": herm,
        "negativity": max(0.0, -lam_min),
        "trace": float(abs(np.trace(rho) - 1.0)),
    }
    return ValidationReport(checks, tol)
