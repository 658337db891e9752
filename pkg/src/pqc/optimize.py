"""Outer minimisation of the worst-case cost over channel parameters."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .channels import ChannelEnsemble, KrausChannel, validate_cptp
from .densmat import ValidationError
from .metrics import AscentConfig, CostEvaluation, DifferenceMap, as_kraus, mean_cost, worst_case_cost
from .noise import NoiseSpec, mixed_cnot_channel

INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class ParametricChannel:
    """Channel family ``theta -> E(theta)`` on a box of closed intervals."""

    builder: Callable[[np.ndarray], KrausChannel | ChannelEnsemble]
    bounds: tuple

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds or any(lo > hi for lo, hi in bounds):
            raise ValueError(f"invalid bounds {self.bounds}")
        object.__setattr__(self, "bounds", bounds)

    @property
    def arity(self) -> int:
        return len(self.bounds)

    def clip(self, theta) -> np.ndarray:
        lo, hi = np.array(self.bounds).T
        return np.clip(np.asarray(theta, dtype=float).reshape(self.arity), lo, hi)

    def __call__(self, theta) -> KrausChannel | ChannelEnsemble:
        return self.builder(self.clip(theta))


def cnot_mixture(spec: NoiseSpec) -> ParametricChannel:
    """The one-parameter family ``w1 -> w1 * Direct + (1 - w1) * HadamardConjugated``."""
    return ParametricChannel(lambda th: mixed_cnot_channel(float(th[0]), spec), ((0.0, 1.0),))


def convex_mixture(first: KrausChannel, second: KrausChannel) -> ParametricChannel:
    """``w -> w * first + (1 - w) * second`` for two arbitrary channels."""
    return ParametricChannel(lambda th: ChannelEnsemble([(float(th[0]), first), (1.0 - float(th[0]), second)]), ((0.0, 1.0),))


def point_seed(seed: int, theta) -> int:
    """Seed keyed on the exact bit pattern of ``theta``, so shared grid points share seeds."""
    bits = np.asarray(theta, dtype=np.float64).reshape(-1).view(np.uint64)
    words = [int(seed)] + [int(b) & 0xFFFFFFFF for b in bits] + [int(b) >> 32 for b in bits]
    return int(np.random.SeedSequence(words).generate_state(1, np.uint32)[0])


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("PQC_THREADS", "1")))
    except ValueError:
        return 1


def golden_section_min(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6) -> tuple:
    """Golden-section search; exact only when ``f`` is unimodal on ``[lo, hi]``.

    Returns the best sampled ``(x, f(x))``; ties go to the smaller ``x``.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    samples = {}

    def ev(x):
        if x not in samples:
            samples[x] = float(f(x))
        return samples[x]

    a, b = float(lo), float(hi)
    c, d = b - INV_PHI * (b - a), a + INV_PHI * (b - a)
    fc, fd = ev(c), ev(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = ev(d)
    ev(lo), ev(hi)
    x_star = min(samples, key=lambda x: (samples[x], x))
    return x_star, samples[x_star]


@dataclass(frozen=True)
class GdaConfig:
    theta0: tuple | None = None
    max_outer: int = 100
    step: float = 0.1
    fd_step: float = 1e-4
    tol: float = 1e-9
    certify_factor: int = 4
    ascent: AscentConfig = field(default_factory=AscentConfig)


@dataclass
class GdaResult:
    theta: np.ndarray
    cost: CostEvaluation
    history: list
    iterations: int
    converged: bool

    def __iter__(self):
        return iter((self.theta, self.cost))


def _certify(pc, target, theta, m, ascent: AscentConfig, factor: int, warm) -> CostEvaluation:
    cfg = replace(ascent, restarts=ascent.restarts * factor)
    return worst_case_cost(target, pc(theta), m, cfg, warm_starts=warm)


def _check_channel(ch) -> None:
    report = validate_cptp(as_kraus(ch), 1e-10)
    if not report:
        raise ValidationError(f"parametric channel produced a non-CPTP map: {report.failures()}")


def minmax_gda(pc: ParametricChannel, target: KrausChannel, m: int = 1, cfg: GdaConfig | None = None) -> GdaResult:
    """Alternating descent on ``theta`` against a multi-start inner ascent.

    Each outer step re-runs the full inner ascent (previous witness added as a
    warm start), takes the central-difference gradient of the cost at the
    inner witness with respect to ``theta``, and moves by a projected step.
    Steps that do not lower the worst-case value are rejected and the learning
    rate halved, so the best-so-far cost in ``history`` never increases.
    """
    cfg = cfg or GdaConfig()
    lo, hi = np.array(pc.bounds).T
    theta = pc.clip(cfg.theta0 if cfg.theta0 is not None else 0.5 * (lo + hi))

    def inner(th, warm):
        ch = pc(th)
        _check_channel(ch)
        return worst_case_cost(target, ch, m, cfg.ascent, warm_starts=warm)

    ev = inner(theta, None)
    history = [ev.value]
    lr = cfg.step
    converged = False
    it = 0
    for it in range(1, cfg.max_outer + 1):
        grad = np.zeros(pc.arity)
        for k in range(pc.arity):
            e = np.zeros(pc.arity)
            e[k] = cfg.fd_step
            up, dn = pc.clip(theta + e), pc.clip(theta - e)
            cu = DifferenceMap(target, pc(up)).costs(ev.witness[None], m)[0]
            cd = DifferenceMap(target, pc(dn)).costs(ev.witness[None], m)[0]
            grad[k] = (cu - cd) / (up[k] - dn[k]) if up[k] > dn[k] else 0.0
        move = pc.clip(theta - lr * grad) - theta
        if np.linalg.norm(move) <= cfg.tol or ev.value <= 1e-14:
            converged = True
            break
        cand = theta + move
        ev_c = inner(cand, [ev.witness])
        if ev_c.value < ev.value:
            theta, ev = cand, ev_c
            lr *= 1.5
        else:
            lr *= 0.5
        history.append(ev.value)
    cost = _certify(pc, target, theta, m, cfg.ascent, cfg.certify_factor, [ev.witness])
    return GdaResult(theta=theta, cost=cost, history=history, iterations=it, converged=converged)


@dataclass
class SweepCurve:
    grid: np.ndarray
    worst_cost: np.ndarray
    mean_cost: np.ndarray
    evaluations: list

    @property
    def witnesses(self) -> list:
        return [e.witness for e in self.evaluations]

    @property
    def argmin(self) -> int:
        """Index of the smallest worst-case cost (first on ties, i.e. smallest parameter)."""
        return int(np.argmin(self.worst_cost))

    @property
    def mean_argmin(self) -> int:
        return int(np.argmin(self.mean_cost))


def sweep_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """Uniform grid whose interior points are ``lo + (hi - lo) * (i / (points - 1))``.

    Computing ``i / (points - 1)`` by a single division makes refined grids
    reproduce shared points bit for bit.
    """
    frac = np.arange(points) / (points - 1)
    return lo + (hi - lo) * frac


def sweep(
    pc: ParametricChannel,
    target: KrausChannel,
    m: int = 1,
    grid_points: int = 101,
    cfg: AscentConfig | None = None,
    mean_samples: int = 2000,
    seed: int = 0,
    workers: int | None = None,
) -> SweepCurve:
    """Worst-case and Haar-mean cost on a uniform grid of a one-parameter family.

    Each grid point uses seeds derived from ``(seed, value)`` so the curve is
    deterministic and independent of the grid it is evaluated on.
    """
    if pc.arity != 1:
        raise ValueError(f"sweep needs a one-parameter family, got arity {pc.arity}")
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    cfg = cfg or AscentConfig()
    (lo, hi), = pc.bounds
    grid = sweep_grid(lo, hi, grid_points)

    def point(w):
        ps = point_seed(seed, w)
        ch = pc([w])
        ev = worst_case_cost(target, ch, m, replace(cfg, seed=ps))
        mc = mean_cost(target, ch, m, mean_samples, ps)
        return ev, mc

    workers = workers or _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, grid))
    else:
        results = [point(w) for w in grid]
    evs = [r[0] for r in results]
    return SweepCurve(
        grid=grid,
        worst_cost=np.array([e.value for e in evs]),
        mean_cost=np.array([r[1] for r in results]),
        evaluations=evs,
    )


def refine_minimum(pc: ParametricChannel, target: KrausChannel, m: int, cfg: AscentConfig, seed: int, bracket: Sequence[float], tol: float = 1e-4) -> tuple:
    """Golden-section refinement of the worst-case cost inside ``bracket``."""

    def f(w):
        return worst_case_cost(target, pc([w]), m, replace(cfg, seed=point_seed(seed, w))).value

    return golden_section_min(f, bracket[0], bracket[1], tol)
