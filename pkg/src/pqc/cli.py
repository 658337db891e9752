"""``pqc`` command-line entry point.

Exit status: 0 success, 1 domain or validation failure, 2 usage, parse or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .channels import ChannelEnsemble, StinespringChannel, apply_kraus, stinespring_to_kraus, validate_cptp
from .config import ConfigError, ExperimentConfig, load_config
from .densmat import (
    DimensionError,
    haar_random_pure_state,
    haar_random_pure_states,
    projector,
    rng_for,
    validate_density_matrix,
)
from .io import load_channel, write_atomic
from .metrics import AscentConfig, DifferenceMap, as_kraus, diamond_distance, extension_label, sampled_max_cost, worst_case_cost
from .noise import noise_layer
from .optimize import convex_mixture, minmax_gda, point_seed, refine_minimum, sweep

CPTP_TOL = 1e-10
STATE_TOL = 1e-9


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(result: dict, out) -> None:
    text = _dump(result)
    if out:
        write_atomic(out, text)
    sys.stdout.write(text)


def _per_m_table(cfg: ExperimentConfig, target, channel) -> list:
    rows = []
    for m in cfg.extension_dims:
        ev = worst_case_cost(target, channel, m, cfg.ascent_config())
        rows.append({"m": m, "n_label": extension_label(m), "cost": ev.value, "converged": ev.converged})
    return rows


def _channels(cfg: ExperimentConfig):
    target = cfg.target_channel()
    first, second = cfg.variant_channels()
    if not (target.dim == first.dim == second.dim):
        raise DimensionError(f"target and variants act on different dimensions ({target.dim}, {first.dim}, {second.dim})")
    return target, first, second


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    target, first, second = _channels(cfg)
    named = {"target": target, "variant_1": first, "variant_2": second}
    if len(cfg.noise.qubits) > 0 and 2 ** len(cfg.noise.qubits) == target.dim:
        named["noise_layer"] = noise_layer(cfg.noise)
    for w in (0.0, 0.5, 1.0):
        named[f"mixture_w1={w}"] = convex_mixture(first, second)([w])
    report, ok = {}, True
    rng = rng_for(cfg.seed, 0xD0)
    states = haar_random_pure_states(4, target.dim, rng)
    for name, ch in named.items():
        kr = as_kraus(ch)
        cptp = validate_cptp(kr, CPTP_TOL)
        entry = {"cptp": cptp.as_dict()}
        if cptp:
            outs = [validate_density_matrix(apply_kraus(kr, projector(s)), STATE_TOL) for s in states]
            entry["outputs_valid"] = all(outs)
            entry["max_output_residual"] = max(max(r.checks.values()) for r in outs)
            ok &= entry["outputs_valid"]
        ok &= cptp.passed
        report[name] = entry
    report["passed"] = bool(ok)
    _emit(report, None)
    return 0 if ok else 1


def _summary_path(out: Path) -> Path:
    return out.with_suffix(".json") if out.suffix == ".csv" else out.with_name(out.name + ".json")


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    target, first, second = _channels(cfg)
    pc = convex_mixture(first, second)
    grid = args.grid or cfg.sweep.grid_points
    if grid < 2:
        raise ConfigError("--grid must be >= 2")
    out = Path(args.out or cfg.output.get("csv") or "sweep.csv")
    if not out.parent.is_dir():
        raise FileNotFoundError(f"output directory {out.parent} does not exist")
    curve = sweep(pc, target, 1, grid, cfg.ascent_config(), cfg.sweep.mean_samples, cfg.seed)

    n_ref = cfg.sweep.reference_states
    refs = [haar_random_pure_state(target.dim, cfg.seed + k) for k in range(1, n_ref + 1)]
    ref_costs = np.array(
        [DifferenceMap(target, pc([w])).costs(np.array(refs), 1) if refs else [] for w in curve.grid]
    ).reshape(grid, n_ref)

    header = ["w1", "worst_cost", "mean_cost"] + [f"cost_state_{k}" for k in range(1, n_ref + 1)]
    lines = [",".join(header)]
    for i, w in enumerate(curve.grid):
        row = [w, curve.worst_cost[i], curve.mean_cost[i], *ref_costs[i]]
        lines.append(",".join(_fmt(v) for v in row))
    csv_text = "\n".join(lines) + "\n"

    i = curve.argmin
    w_star = float(curve.grid[i])
    star = pc([w_star])
    summary = {
        "grid_points": grid,
        "argmin_index": i,
        "w1_star": w_star,
        "worst_cost_at_w1_star": float(curve.worst_cost[i]),
        "interior_argmin": 0 < i < grid - 1,
        "worst_cost_endpoints": {"w1=0": float(curve.worst_cost[0]), "w1=1": float(curve.worst_cost[-1])},
        "min_mean": {"w1": float(curve.grid[curve.mean_argmin]), "mean_cost": float(curve.mean_cost[curve.mean_argmin])},
        "per_m_at_w1_star": _per_m_table(cfg, target, star),
        "seed": cfg.seed,
    }
    write_atomic(out, csv_text)
    write_atomic(Path(args.summary) if args.summary else _summary_path(out), _dump(summary))
    sys.stdout.write(_dump(summary))
    return 0


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    target, first, second = _channels(cfg)
    pc = convex_mixture(first, second)
    method = args.method
    if method == "golden":
        w, _ = refine_minimum(pc, target, 1, cfg.ascent_config(), cfg.seed, (0.0, 1.0), tol=args.tol)
        theta = np.array([w])
    else:
        theta = minmax_gda(pc, target, 1, cfg.gda_config()).theta
    asc = cfg.ascent_config()
    cert_cfg = replace(asc, restarts=asc.restarts * cfg.gda.certify_factor, seed=point_seed(cfg.seed, theta))
    cert = worst_case_cost(target, pc(theta), 1, cert_cfg)
    result = {
        "method": method,
        "w1_star": float(theta[0]),
        "theta_star": [float(t) for t in theta],
        "certified_cost": cert.value,
        "converged": cert.converged,
        "witness": cert.to_dict()["witness"],
        "per_m": _per_m_table(cfg, target, pc(theta)),
        "seed": cfg.seed,
    }
    _emit(result, args.out or cfg.output.get("json"))
    return 0


def _load_kraus(path):
    ch = load_channel(path)
    if isinstance(ch, StinespringChannel):
        return stinespring_to_kraus(ch)
    if isinstance(ch, ChannelEnsemble):
        return ch.to_kraus()
    return ch


def cmd_distance(args) -> int:
    try:
        a, b = _load_kraus(args.channel_a), _load_kraus(args.channel_b)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot load channel: {exc}") from exc
    if a.dim != b.dim:
        raise DimensionError(f"channels act on different dimensions ({a.dim} vs {b.dim})")
    for name, ch in (("channel_a", a), ("channel_b", b)):
        rep = validate_cptp(ch, CPTP_TOL)
        if not rep:
            sys.stderr.write(f"pqc: {name} is not CPTP: {rep.failures()}\n")
            return 1
    res = diamond_distance(a, b, AscentConfig(seed=args.seed), max_ext=args.max_ext)
    result = {
        "diamond_lower_bound": res.value,
        "argmax_m": res.argmax_m,
        "argmax_n_label": extension_label(res.argmax_m),
        "per_m": [
            {"m": e.ext_dim, "n_label": e.n_label, "cost": e.value, "converged": e.converged, "witness": e.to_dict()["witness"]}
            for e in res.per_m
        ],
    }
    if args.samples:
        result["sampled_bound_m1"] = sampled_max_cost(a, b, 1, args.samples, args.seed)
    _emit(result, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pqc", description="Parametric quantum channel distances and optimization.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check every configured channel is CPTP")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("sweep", help="worst-case and mean cost over a w1 grid")
    s.add_argument("config")
    s.add_argument("--grid", type=int, default=None, help="grid points (default: config sweep.grid_points)")
    s.add_argument("--out", default=None, help="CSV output path")
    s.add_argument("--summary", default=None, help="JSON summary path (default: next to the CSV)")
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("optimize", help="min-max optimal mixing weight")
    o.add_argument("config")
    o.add_argument("--out", default=None)
    o.add_argument("--method", choices=("golden", "gda"), default="golden")
    o.add_argument("--tol", type=float, default=1e-4)
    o.set_defaults(func=cmd_optimize)

    d = sub.add_parser("distance", help="extension-resolved worst-case distance between two channel files")
    d.add_argument("channel_a")
    d.add_argument("channel_b")
    d.add_argument("--max-ext", type=int, default=None, help="largest extension dimension (default: system dim)")
    d.add_argument("--samples", type=int, default=0, help="also report the best of N Haar inputs (m = 1)")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", default=None)
    d.set_defaults(func=cmd_distance)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DimensionError, OSError) as exc:
        sys.stderr.write(f"pqc: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"pqc: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
