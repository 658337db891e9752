"""Kraus, Stinespring and ensemble representations of quantum channels.

Choi matrices use the input-first convention
``J = sum_ij |i><j| (x) E(|i><j|)``, so a Kraus operator ``K`` corresponds to
the Choi eigenvector ``vec(K)[i*d + k] = K[k, i]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .densmat import (
    DEFAULT_TOL,
    DimensionError,
    ValidationError,
    ValidationReport,
    dagger,
    partial_trace,
    rng_for,
)

#: Kraus operators with ``Tr(K^dagger K)`` below this are dropped.
PRUNE_TOL = 1e-12


class NotCompletelyPositiveError(ValidationError):
    """A Choi matrix has an eigenvalue below ``-tol``."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Channel ``rho -> sum_a K_a rho K_a^dagger`` on a ``dim``-dimensional space."""

    operators: np.ndarray

    def __init__(self, operators):
        ops = np.array([np.asarray(k, dtype=complex) for k in operators]) if not isinstance(
            operators, np.ndarray
        ) else np.asarray(operators, dtype=complex)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[0] == 0 or ops.shape[1] != ops.shape[2]:
            raise DimensionError(f"Kraus operators must be a non-empty stack of square matrices, got {ops.shape}")
        if not np.all(np.isfinite(ops)):
            raise ValidationError("Kraus operators contain non-finite entries")
        object.__setattr__(self, "operators", _frozen(ops))

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    def __len__(self) -> int:
        return self.operators.shape[0]

    def __iter__(self):
        return iter(self.operators)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply_kraus(self, rho)

    @classmethod
    def unitary(cls, u: np.ndarray) -> KrausChannel:
        return cls([u])

    @classmethod
    def identity(cls, dim: int) -> KrausChannel:
        return cls([np.eye(dim)])


@dataclass(frozen=True, eq=False)
class StinespringChannel:
    """Unitary dilation on ``ancilla (x) system`` with the ancilla prepared in a basis state."""

    system_qubits: int
    ancilla_qubits: int
    dilation: np.ndarray
    ancilla_init: int = 0

    def __post_init__(self):
        u = _frozen(self.dilation)
        object.__setattr__(self, "dilation", u)
        n = 2 ** (self.system_qubits + self.ancilla_qubits)
        if u.shape != (n, n):
            raise DimensionError(f"dilation must be {n}x{n}, got {u.shape}")
        if not 0 <= self.ancilla_init < 2**self.ancilla_qubits:
            raise ValueError(f"ancilla_init {self.ancilla_init} out of range")
        residual = np.max(np.abs(dagger(u) @ u - np.eye(n)))
        if residual > 1e-10:
            raise ValidationError(f"dilation is not unitary (residual {residual:.3e})")

    @property
    def dim(self) -> int:
        return 2**self.system_qubits


@dataclass(frozen=True, eq=False)
class ChannelEnsemble:
    """Convex mixture ``sum_i w_i E_i`` of Kraus channels."""

    weights: tuple
    channels: tuple

    def __init__(self, members):
        members = list(members)
        if not members:
            raise ValueError("ensemble needs at least one member")
        weights = tuple(float(w) for w, _ in members)
        channels = tuple(c for _, c in members)
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise ValidationError(f"ensemble weights must be non-negative and sum to 1, got {weights}")
        if len({c.dim for c in channels}) != 1:
            raise DimensionError("ensemble members act on different dimensions")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "channels", channels)

    @property
    def dim(self) -> int:
        return self.channels[0].dim

    @property
    def members(self) -> list:
        return list(zip(self.weights, self.channels))

    def to_kraus(self) -> KrausChannel:
        """Single Kraus set ``{sqrt(w_i) K}`` reproducing the mixture exactly."""
        ops = [math.sqrt(w) * k for w, ch in self.members if w > 0 for k in ch.operators]
        return KrausChannel(ops)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply_ensemble_exact(self, rho)


def _check_square(rho: np.ndarray, dim: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise DimensionError(f"expected a {dim}x{dim} operator, got {rho.shape}")
    return rho


def apply_kraus(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    rho = _check_square(rho, ch.dim)
    k = ch.operators
    return np.einsum("aij,jk,alk->il", k, rho, k.conj())


def validate_cptp(ch: KrausChannel, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Report ``||sum K^dagger K - I||`` (max-abs) and Choi negativity."""
    k = ch.operators
    tp = np.einsum("aji,ajk->ik", k.conj(), k)
    choi_min = float(np.linalg.eigvalsh(choi_from_kraus(ch))[0])
    checks = {
        "trace_preservation": float(np.max(np.abs(tp - np.eye(ch.dim)))),
        "choi_negativity": max(0.0, -choi_min),
    }
    return ValidationReport(checks, tol)


def choi_from_kraus(ch: KrausChannel) -> np.ndarray:
    """Unnormalised Choi matrix, trace ``d`` for a trace-preserving channel."""
    vecs = np.swapaxes(ch.operators, 1, 2).reshape(len(ch), -1)
    return vecs.T @ vecs.conj()


def kraus_from_choi(j: np.ndarray, tol: float = PRUNE_TOL) -> KrausChannel:
    """Canonical Kraus set from the eigen-decomposition of a Choi matrix.

    Operators are ``sqrt(lambda_a)`` times the reshaped eigenvectors, ordered by
    non-increasing ``lambda_a``; eigenvalues ``<= tol`` are dropped. The result
    satisfies ``Tr(K_a^dagger K_b) = lambda_a delta_ab``.
    """
    j = np.asarray(j, dtype=complex)
    d = math.isqrt(j.shape[0])
    if j.shape != (d * d, d * d):
        raise DimensionError(f"Choi matrix must be d^2 x d^2, got {j.shape}")
    lam, vecs = np.linalg.eigh(0.5 * (j + dagger(j)))
    if lam[0] < -tol:
        raise NotCompletelyPositiveError(f"Choi matrix has eigenvalue {lam[0]:.3e} < -{tol:g}")
    order = np.argsort(-lam, kind="stable")
    keep = [i for i in order if lam[i] > tol]
    if not keep:
        return KrausChannel([np.zeros((d, d))])
    ops = [math.sqrt(lam[i]) * vecs[:, i].reshape(d, d).T for i in keep]
    return KrausChannel(ops)


def canonicalize(ch: KrausChannel) -> KrausChannel:
    """Orthogonal Kraus representative with non-increasing weights, at most ``d^2`` operators."""
    return kraus_from_choi(choi_from_kraus(ch), tol=PRUNE_TOL)


def kraus_weights(ch: KrausChannel) -> np.ndarray:
    """``Tr(K_a^dagger K_a)`` per operator."""
    return np.einsum("aij,aij->a", ch.operators.conj(), ch.operators).real


def stinespring_to_kraus(st: StinespringChannel) -> KrausChannel:
    """Blocks ``K_a = (<a| (x) I) U (|nu0> (x) I)``, null blocks pruned."""
    d = st.dim
    na = 2**st.ancilla_qubits
    cols = st.dilation[:, st.ancilla_init * d : (st.ancilla_init + 1) * d]
    blocks = cols.reshape(na, d, d)
    norms = np.einsum("aij,aij->a", blocks.conj(), blocks).real
    kept = [b for b, n in zip(blocks, norms) if n >= PRUNE_TOL]
    return KrausChannel(kept if kept else blocks[:1])


def _complete_unitary(iso: np.ndarray, placed: Sequence[int]) -> np.ndarray:
    """Unitary whose columns ``placed`` are the columns of ``iso``.

    The free columns are filled by Gram-Schmidt over the standard basis,
    taking candidates in index order.
    """
    n = iso.shape[0]
    u = np.zeros((n, n), dtype=complex)
    u[:, list(placed)] = iso
    basis = [iso[:, i] for i in range(iso.shape[1])]
    free = [c for c in range(n) if c not in set(placed)]
    cand = 0
    for c in free:
        while True:
            v = np.zeros(n, dtype=complex)
            v[cand] = 1.0
            cand += 1
            for _ in range(2):
                for b in basis:
                    v = v - b * np.vdot(b, v)
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                break
        v = v / norm
        basis.append(v)
        u[:, c] = v
    return u


def kraus_to_stinespring(ch: KrausChannel, tol: float = 1e-10) -> StinespringChannel:
    """Dilation with ``ceil(log2 |K|)`` ancilla qubits initialised to ``|0>``."""
    report = validate_cptp(ch, tol)
    if not report:
        raise ValidationError(f"channel is not CPTP: {report.failures()}")
    d = ch.dim
    qs = int(round(math.log2(d)))
    if 2**qs != d:
        raise DimensionError(f"dimension {d} is not a power of two")
    qa = math.ceil(math.log2(len(ch))) if len(ch) > 1 else 0
    na = 2**qa
    ops = np.zeros((na, d, d), dtype=complex)
    ops[: len(ch)] = ch.operators
    iso = ops.reshape(na * d, d)
    # re-orthonormalise the isometry so the completed dilation is unitary to machine precision
    q, r = np.linalg.qr(iso)
    iso = q * (np.diag(r) / np.abs(np.diag(r)))
    u = _complete_unitary(iso, range(d))
    return StinespringChannel(qs, qa, u, 0)


def apply_stinespring(st: StinespringChannel, rho: np.ndarray) -> np.ndarray:
    d = st.dim
    na = 2**st.ancilla_qubits
    rho = _check_square(rho, d)
    anc = np.zeros((na, na), dtype=complex)
    anc[st.ancilla_init, st.ancilla_init] = 1.0
    u = st.dilation
    big = u @ np.kron(anc, rho) @ dagger(u)
    return partial_trace(big, [na, d], keep=[1])


def apply_ensemble_exact(en: ChannelEnsemble, rho: np.ndarray) -> np.ndarray:
    rho = _check_square(rho, en.dim)
    return sum(w * apply_kraus(ch, rho) for w, ch in en.members)


def apply_ensemble_sampled(en: ChannelEnsemble, rho: np.ndarray, m: int, seed: int) -> np.ndarray:
    """Average of ``m`` i.i.d. member applications drawn with the ensemble weights."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rho = _check_square(rho, en.dim)
    draws = rng_for(seed).choice(len(en.channels), size=m, p=np.asarray(en.weights))
    counts = np.bincount(draws, minlength=len(en.channels))
    return sum(c * apply_kraus(ch, rho) for c, ch in zip(counts, en.channels) if c) / m


def compose(first: KrausChannel, second: KrausChannel) -> KrausChannel:
    """Channel ``second o first``, canonicalised."""
    if first.dim != second.dim:
        raise DimensionError(f"cannot compose dimensions {first.dim} and {second.dim}")
    ops = np.einsum("bij,ajk->baik", second.operators, first.operators).reshape(-1, first.dim, first.dim)
    return canonicalize(KrausChannel(ops))


def extend(ch: KrausChannel, ext_dim: int) -> KrausChannel:
    """Trivial extension ``I_ext (x) E`` acting on ``ext (x) system``."""
    if ext_dim < 1:
        raise ValueError("ext_dim must be >= 1")
    if ext_dim == 1:
        return ch
    eye = np.eye(ext_dim)
    return KrausChannel([np.kron(eye, k) for k in ch.operators])


def tensor(*channels: KrausChannel) -> KrausChannel:
    """Parallel composition, first channel on the leftmost factor."""
    ops = channels[0].operators
    for ch in channels[1:]:
        ops = np.einsum("aij,bkl->abikjl", ops, ch.operators).reshape(
            len(ops) * len(ch), ops.shape[1] * ch.dim, ops.shape[2] * ch.dim
        )
    return KrausChannel(ops)


def choi_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Frobenius distance between Choi matrices."""
    return float(np.linalg.norm(choi_from_kraus(a) - choi_from_kraus(b)))
