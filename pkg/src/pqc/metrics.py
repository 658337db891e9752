"""Trace-distance based distances between states and channels.

Extensions are indexed by the auxiliary dimension ``m >= 1``: the input is a
pure state on ``C^m (x) C^d`` and ``m = 1`` means no extension at all (the
worst case over plain system inputs, often written ``n = 0``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import ChannelEnsemble, KrausChannel, apply_kraus, choi_from_kraus, extend
from .densmat import DimensionError, dagger, haar_random_pure_states, projector, rng_for


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """``0.5 * Tr|rho1 - rho2|``."""
    rho1 = np.asarray(rho1, dtype=complex)
    rho2 = np.asarray(rho2, dtype=complex)
    if rho1.shape != rho2.shape:
        raise DimensionError(f"shape mismatch {rho1.shape} vs {rho2.shape}")
    # average both orderings so the result is exactly symmetric in floating point
    total = 0.0
    for diff in (rho1 - rho2, rho2 - rho1):
        total += float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + dagger(diff))))))
    return 0.25 * total


def as_kraus(ch) -> KrausChannel:
    if isinstance(ch, ChannelEnsemble):
        return ch.to_kraus()
    if isinstance(ch, KrausChannel):
        return ch
    raise TypeError(f"expected a KrausChannel or ChannelEnsemble, got {type(ch).__name__}")


def extension_label(m: int) -> int:
    """Extension label in the ``n`` convention, where ``n = 0`` means no extension."""
    return 0 if m == 1 else m


class DifferenceMap:
    """Hermiticity-preserving map ``E_target - E_candidate`` in signed-Kraus form.

    The Choi matrix of the difference is diagonalised once, giving at most
    ``d^2`` operators ``A_k`` with real weights ``c_k`` such that
    ``Delta(rho) = sum_k c_k A_k rho A_k^dagger``. Batched evaluation on pure
    inputs of ``C^m (x) C^d`` then costs one stacked ``eigvalsh`` per state.
    """

    def __init__(self, target, candidate):
        target, candidate = as_kraus(target), as_kraus(candidate)
        if target.dim != candidate.dim:
            raise DimensionError(f"channel dimensions differ: {target.dim} vs {candidate.dim}")
        d = target.dim
        self.dim = d
        diff = choi_from_kraus(target) - choi_from_kraus(candidate)
        lam, vecs = np.linalg.eigh(0.5 * (diff + dagger(diff)))
        ops = np.swapaxes(vecs.T.reshape(-1, d, d), 1, 2)
        scale = np.sqrt(np.abs(lam))
        pos, neg = lam > 0, lam < 0
        # right-multiplication form: phi = psi @ A^T
        self._pos = (ops[pos] * scale[pos, None, None]).transpose(0, 2, 1).copy()
        self._neg = (ops[neg] * scale[neg, None, None]).transpose(0, 2, 1).copy()

    def _branch(self, ops: np.ndarray, psi: np.ndarray, m: int) -> np.ndarray:
        n = psi.shape[0]
        if len(ops) == 0:
            return np.zeros((n, m * self.dim, 0), dtype=complex)
        phi = np.matmul(psi.reshape(1, n, m, self.dim), ops[:, None])  # (A, N, m, d)
        return np.moveaxis(phi.reshape(len(ops), n, m * self.dim), 0, -1)

    def outputs(self, psi: np.ndarray, m: int = 1) -> np.ndarray:
        """``(I_m (x) Delta)(|psi><psi|)`` for a stack of states ``psi`` of shape ``(N, m*d)``."""
        psi = np.atleast_2d(np.asarray(psi, dtype=complex))
        if psi.shape[1] != m * self.dim:
            raise DimensionError(f"states have length {psi.shape[1]}, expected {m * self.dim}")
        p = self._branch(self._pos, psi, m)
        q = self._branch(self._neg, psi, m)
        return p @ dagger(p) - q @ dagger(q)

    def costs(self, psi: np.ndarray, m: int = 1) -> np.ndarray:
        """Trace distance between the two channel outputs for each row of ``psi``."""
        out = self.outputs(psi, m)
        return 0.5 * np.sum(np.abs(np.linalg.eigvalsh(out)), axis=-1)

    def costs_and_gradients(self, psi: np.ndarray, m: int = 1) -> tuple:
        """Costs plus ``G psi`` where ``G = Delta^*(sign(Delta(psi psi^dagger)))``.

        With ``S`` the sign of the output difference, the cost equals
        ``0.5 <psi|Delta^*(S)|psi>`` and ``Re <dpsi|G psi>`` is its directional
        derivative wherever no output eigenvalue crosses zero.
        """
        psi = np.atleast_2d(np.asarray(psi, dtype=complex))
        out = self.outputs(psi, m)
        lam, vecs = np.linalg.eigh(out)
        cost = 0.5 * np.sum(np.abs(lam), axis=-1)
        # S psi-side contraction: (I (x) A^dagger) S (I (x) A) psi, per signed operator
        sign_mat = (vecs * np.sign(lam)[:, None, :]) @ dagger(vecs)
        grad = self._adjoint_apply(self._pos, sign_mat, psi, m) - self._adjoint_apply(self._neg, sign_mat, psi, m)
        return cost, grad

    def _adjoint_apply(self, ops: np.ndarray, s: np.ndarray, psi: np.ndarray, m: int) -> np.ndarray:
        n = psi.shape[0]
        if len(ops) == 0:
            return np.zeros_like(psi)
        phi = np.matmul(psi.reshape(1, n, m, self.dim), ops[:, None])  # (A, N, m, d)
        sphi = np.matmul(s[None], phi.reshape(len(ops), n, m * self.dim, 1))[..., 0]
        back = np.matmul(sphi.reshape(len(ops), n, m, self.dim), dagger(ops)[:, None])
        return back.sum(axis=0).reshape(n, m * self.dim)


def cost_at_state(target, candidate, eta: np.ndarray, m: int = 1) -> float:
    """Trace distance between ``(I_m (x) target)(eta)`` and ``(I_m (x) candidate)(eta)``.

    Reference path: builds both extended channels explicitly and applies them.
    """
    target, candidate = as_kraus(target), as_kraus(candidate)
    eta = np.asarray(eta, dtype=complex).reshape(-1)
    if target.dim != candidate.dim:
        raise DimensionError(f"channel dimensions differ: {target.dim} vs {candidate.dim}")
    if eta.size != m * target.dim:
        raise DimensionError(f"state has length {eta.size}, expected {m * target.dim}")
    rho = projector(eta / np.linalg.norm(eta))
    return trace_distance(apply_kraus(extend(target, m), rho), apply_kraus(extend(candidate, m), rho))


@dataclass(frozen=True)
class AscentConfig:
    """Multi-start projected gradient ascent over pure input states."""

    restarts: int = 16
    max_iters: int = 500
    step: float = 0.1
    tol: float = 1e-10
    fd_step: float = 1e-5
    stall_iters: int = 20
    stall_tol: float = 1e-12
    growth: float = 1.5
    max_step: float = 1.0
    gradient: str = "analytic"
    seed: int = 0

    def __post_init__(self):
        if self.gradient not in ("analytic", "fd"):
            raise ValueError(f"gradient must be 'analytic' or 'fd', got {self.gradient!r}")
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be >= 1")
        if self.step <= 0 or self.fd_step <= 0 or self.tol < 0:
            raise ValueError("step sizes must be positive and tol non-negative")


@dataclass
class CostEvaluation:
    value: float
    witness: np.ndarray
    ext_dim: int
    converged: bool
    iterations: int
    restart_values: list = field(default_factory=list)

    @property
    def n_label(self) -> int:
        return extension_label(self.ext_dim)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = [[float(z.real), float(z.imag)] for z in self.witness]
        d["n_label"] = self.n_label
        return d


def _to_complex(x: np.ndarray) -> np.ndarray:
    half = x.shape[-1] // 2
    psi = x[..., :half] + 1j * x[..., half:]
    return psi / np.linalg.norm(psi, axis=-1, keepdims=True)


def _to_real(psi: np.ndarray) -> np.ndarray:
    return np.concatenate([psi.real, psi.imag], axis=-1)


def _fd_gradient(objective, x: np.ndarray, h: float) -> np.ndarray:
    """Central differences of ``objective`` along every ambient real coordinate."""
    k, n = x.shape
    shift = h * np.eye(n)
    pert = np.concatenate([x[:, None, :] + shift, x[:, None, :] - shift], axis=1)
    vals = objective(pert.reshape(-1, n)).reshape(k, 2, n)
    return (vals[:, 0] - vals[:, 1]) / (2 * h)


def _ascend(objective, gradient, starts, cfg: AscentConfig, reseed) -> tuple:
    """Lock-step ascent of every restart slot; each slot evolves independently.

    ``objective`` maps unit ambient real vectors ``(N, 2D)`` to values and
    ``gradient`` returns their ambient gradients. ``reseed(slot, k)`` returns
    the ``k``-th replacement start for a stalled slot.
    """
    x = starts / np.linalg.norm(starts, axis=1, keepdims=True)
    r = x.shape[0]
    f = objective(x)
    best_f, best_x = f.copy(), x.copy()
    t = np.full(r, cfg.step)
    stall = np.zeros(r, dtype=int)
    n_reseed = np.zeros(r, dtype=int)
    active = np.ones(r, dtype=bool)
    converged = np.zeros(r, dtype=bool)
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            iters -= 1
            break
        xi, fi = x[idx], f[idx]
        g = gradient(xi)
        g -= np.sum(g * xi, axis=1, keepdims=True) * xi
        gnorm = np.linalg.norm(g, axis=1)
        cand = xi + t[idx, None] * g
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        fc = objective(cand)
        gain = fc - fi
        acc = gain > 0
        x[idx[acc]] = cand[acc]
        f[idx[acc]] = fc[acc]
        t[idx[~acc]] *= 0.5
        t[idx[acc]] = np.minimum(t[idx[acc]] * cfg.growth, cfg.max_step)

        better = f[idx] > best_f[idx]
        best_f[idx[better]] = f[idx[better]]
        best_x[idx[better]] = x[idx[better]]

        done = (acc & (gain <= cfg.tol * np.maximum(np.abs(fi), 1e-300))) | (gnorm <= 1e-14)
        converged[idx[done]] = True
        active[idx[done]] = False

        stalled = np.where(gain > cfg.stall_tol, 0, stall[idx] + 1)
        stall[idx] = stalled
        for j in idx[(stalled >= cfg.stall_iters) & ~done]:
            n_reseed[j] += 1
            x[j] = reseed(j, int(n_reseed[j]))
            f[j] = objective(x[j : j + 1])[0]
            t[j] = cfg.step
            stall[j] = 0
            if f[j] > best_f[j]:
                best_f[j], best_x[j] = f[j], x[j]
    return best_f, best_x, converged, iters


def _restart_states(cfg: AscentConfig, dim: int) -> tuple:
    starts = np.stack([haar_random_pure_states(1, dim, rng_for(cfg.seed, i))[0] for i in range(cfg.restarts)])

    def reseed(slot, k):
        return _to_real(haar_random_pure_states(1, dim, rng_for(cfg.seed, slot, k))[0])

    return _to_real(starts), reseed


def worst_case_cost(target, candidate, m: int = 1, cfg: AscentConfig | None = None, warm_starts=None) -> CostEvaluation:
    """Largest trace distance between extended outputs found by multi-start ascent.

    Restart ``i`` starts from a Haar state keyed on ``(cfg.seed, i)`` and evolves
    independently of the others, so raising ``cfg.restarts`` never lowers the
    result. ``warm_starts`` are extra initial states appended after the Haar
    restarts. The value is a lower bound on the supremum over all inputs.
    """
    cfg = cfg or AscentConfig()
    if m < 1:
        raise ValueError("extension dimension must be >= 1")
    dmap = DifferenceMap(target, candidate)
    dim = m * dmap.dim

    def objective(x):
        return dmap.costs(_to_complex(x), m)

    if cfg.gradient == "fd":
        def gradient(x):
            return _fd_gradient(objective, x, cfg.fd_step)
    else:
        def gradient(x):
            # cost is evaluated on x/|x|; x is unit length here so no chain-rule factor
            _, g = dmap.costs_and_gradients(_to_complex(x), m)
            return _to_real(g)

    starts, reseed = _restart_states(cfg, dim)
    if warm_starts is not None and len(warm_starts):
        warm = np.atleast_2d(np.asarray(warm_starts, dtype=complex))
        if warm.shape[1] != dim:
            raise DimensionError(f"warm starts have length {warm.shape[1]}, expected {dim}")
        starts = np.concatenate([starts, _to_real(warm)])
    best_f, best_x, conv, iters = _ascend(objective, gradient, starts, cfg, reseed)
    # first maximum wins ties, i.e. the lowest restart seed
    k = int(np.argmax(best_f))
    return CostEvaluation(
        value=float(best_f[k]),
        witness=_to_complex(best_x[k]),
        ext_dim=m,
        converged=bool(conv[k]),
        iterations=iters,
        restart_values=[float(v) for v in best_f],
    )


def sampled_costs(target, candidate, m: int, samples: int, seed: int, chunk: int = 20000) -> np.ndarray:
    """Cost at ``samples`` Haar-random pure inputs (deterministic given ``seed``)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    dmap = DifferenceMap(target, candidate)
    rng = rng_for(seed)
    out = []
    for start in range(0, samples, chunk):
        n = min(chunk, samples - start)
        out.append(dmap.costs(haar_random_pure_states(n, m * dmap.dim, rng), m))
    return np.concatenate(out)


def mean_cost(target, candidate, m: int = 1, samples: int = 2000, seed: int = 0) -> float:
    """Average cost over Haar-random pure inputs."""
    return float(np.mean(sampled_costs(target, candidate, m, samples, seed)))


def sampled_max_cost(target, candidate, m: int = 1, samples: int = 100_000, seed: int = 0) -> float:
    """Brute-force lower bound on the worst case: best of ``samples`` Haar inputs."""
    return float(np.max(sampled_costs(target, candidate, m, samples, seed)))


@dataclass
class DiamondResult:
    value: float
    argmax_m: int
    per_m: list

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_m": self.argmax_m,
            "argmax_n_label": extension_label(self.argmax_m),
            "per_m": [e.to_dict() for e in self.per_m],
        }


def diamond_distance(target, candidate, cfg: AscentConfig | None = None, max_ext: int | None = None) -> DiamondResult:
    """Maximum of the worst-case cost over extension dimensions ``m = 1 .. max_ext``.

    ``max_ext`` defaults to the system dimension ``d``, which suffices for the
    supremum over all extensions.
    """
    d = as_kraus(target).dim
    max_ext = d if max_ext is None else int(max_ext)
    if not 1 <= max_ext:
        raise ValueError("max_ext must be >= 1")
    per_m = [worst_case_cost(target, candidate, m, cfg) for m in range(1, max_ext + 1)]
    vals = [e.value for e in per_m]
    k = int(np.argmax(vals))
    return DiamondResult(value=vals[k], argmax_m=k + 1, per_m=per_m)
