"""Density-matrix channel simulation with worst-case distances and min-max tuning."""

from .channels import (
    ChannelEnsemble,
    KrausChannel,
    StinespringChannel,
    apply_kraus,
    canonicalize,
    choi_from_kraus,
    kraus_from_choi,
    kraus_to_stinespring,
    stinespring_to_kraus,
    validate_cptp,
)
from .densmat import DimensionError, ValidationError, partial_trace, validate_density_matrix
from .metrics import AscentConfig, cost_at_state, diamond_distance, mean_cost, trace_distance, worst_case_cost
from .noise import GateVariant, NoiseSpec, QubitNoise, build_cnot_variant, ideal_cnot, mixed_cnot_channel
from .optimize import GdaConfig, ParametricChannel, cnot_mixture, minmax_gda, sweep

__all__ = [
    "AscentConfig",
    "ChannelEnsemble",
    "DimensionError",
    "GateVariant",
    "GdaConfig",
    "KrausChannel",
    "NoiseSpec",
    "ParametricChannel",
    "QubitNoise",
    "StinespringChannel",
    "ValidationError",
    "apply_kraus",
    "build_cnot_variant",
    "canonicalize",
    "choi_from_kraus",
    "cnot_mixture",
    "cost_at_state",
    "diamond_distance",
    "ideal_cnot",
    "kraus_from_choi",
    "kraus_to_stinespring",
    "mean_cost",
    "minmax_gda",
    "mixed_cnot_channel",
    "partial_trace",
    "stinespring_to_kraus",
    "sweep",
    "trace_distance",
    "validate_cptp",
    "validate_density_matrix",
    "worst_case_cost",
]
