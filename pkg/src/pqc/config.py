"""Experiment configuration: strict JSON parsing into typed settings.

Example (all keys optional, values shown are the defaults)::

    {
      "seed": 1234,
      "noise": {"qubits": [{"depolarizing": 0.01, "amplitude_damping": 0.05},
                           {"depolarizing": 0.03, "amplitude_damping": 0.3}],
                "noise_order": "depol_first"},
      "target": "cnot",
      "variants": ["direct", "hadamard_conjugated"],
      "extension_dims": [1, 2, 4],
      "ascent": {"restarts": 16, "max_iters": 500, "step": 0.1, ...},
      "gda": {"max_outer": 100, "step": 0.1, "fd_step": 1e-4, "tol": 1e-9, "certify_factor": 4},
      "sweep": {"grid_points": 101, "mean_samples": 2000, "reference_states": 8},
      "output": {"csv": null, "json": null}
    }

``target`` and each entry of ``variants`` may instead be ``{"file": path}``
pointing at a serialized channel; relative paths resolve against the config
file's directory.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .channels import ChannelEnsemble, KrausChannel, StinespringChannel, stinespring_to_kraus
from .io import load_channel
from .metrics import AscentConfig
from .noise import GateVariant, NoiseSpec, build_cnot_variant, ideal_cnot
from .optimize import GdaConfig


class ConfigError(ValueError):
    """The configuration cannot be parsed or holds out-of-range values."""


@dataclass(frozen=True)
class SweepSettings:
    grid_points: int = 101
    mean_samples: int = 2000
    reference_states: int = 8


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 1234
    noise: NoiseSpec = field(default_factory=NoiseSpec.asymmetric)
    target: object = "cnot"
    variants: tuple = ("direct", "hadamard_conjugated")
    extension_dims: tuple = (1, 2, 4)
    ascent: AscentConfig = field(default_factory=AscentConfig)
    gda: GdaConfig = field(default_factory=GdaConfig)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    output: dict = field(default_factory=lambda: {"csv": None, "json": None})
    base_dir: Path = Path(".")

    def ascent_config(self) -> AscentConfig:
        return dataclasses.replace(self.ascent, seed=self.seed)

    def gda_config(self) -> GdaConfig:
        return dataclasses.replace(self.gda, ascent=self.ascent_config())

    def _resolve(self, entry, allow_variant: bool) -> KrausChannel:
        if isinstance(entry, dict):
            ch = load_channel(self.base_dir / entry["file"])
            if isinstance(ch, StinespringChannel):
                return stinespring_to_kraus(ch)
            if isinstance(ch, ChannelEnsemble):
                return ch.to_kraus()
            return ch
        if entry == "cnot":
            return ideal_cnot()
        if allow_variant:
            return build_cnot_variant(GateVariant(entry), self.noise)
        raise ConfigError(f"unknown target {entry!r}")

    def target_channel(self) -> KrausChannel:
        return self._resolve(self.target, allow_variant=False)

    def variant_channels(self) -> tuple:
        return tuple(self._resolve(v, allow_variant=True) for v in self.variants)


def _fields(cls) -> set:
    return {f.name for f in dataclasses.fields(cls)}


def _section(data, cls, name: str, exclude=()):
    if not isinstance(data, dict):
        raise ConfigError(f"'{name}' must be an object")
    allowed = _fields(cls) - set(exclude)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{name}': {exc}") from exc


def parse_config(data: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    top = _fields(ExperimentConfig) - {"base_dir"}
    unknown = set(data) - top
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    kw = {"base_dir": Path(base_dir)}
    if "seed" in data:
        if not isinstance(data["seed"], int) or data["seed"] < 0:
            raise ConfigError("'seed' must be a non-negative integer")
        kw["seed"] = data["seed"]
    if "noise" in data:
        try:
            kw["noise"] = NoiseSpec.from_dict(data["noise"])
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"invalid 'noise': {exc}") from exc
    if "target" in data:
        t = data["target"]
        if not (t == "cnot" or (isinstance(t, dict) and set(t) == {"file"})):
            raise ConfigError("'target' must be \"cnot\" or {\"file\": path}")
        kw["target"] = t
    if "variants" in data:
        v = data["variants"]
        valid = {g.value for g in GateVariant}
        if not isinstance(v, list) or len(v) != 2 or not all(
            (isinstance(x, str) and x in valid) or (isinstance(x, dict) and set(x) == {"file"}) for x in v
        ):
            raise ConfigError(f"'variants' must list two entries from {sorted(valid)} or {{\"file\": path}}")
        kw["variants"] = tuple(v)
    if "extension_dims" in data:
        e = data["extension_dims"]
        if not isinstance(e, list) or not e or not all(isinstance(x, int) and x >= 1 for x in e):
            raise ConfigError("'extension_dims' must be a non-empty list of integers >= 1")
        kw["extension_dims"] = tuple(e)
    if "ascent" in data:
        kw["ascent"] = _section(data["ascent"], AscentConfig, "ascent", exclude=("seed",))
    if "gda" in data:
        g = dict(data["gda"]) if isinstance(data["gda"], dict) else data["gda"]
        if isinstance(g, dict) and "theta0" in g and g["theta0"] is not None:
            g["theta0"] = tuple(g["theta0"])
        kw["gda"] = _section(g, GdaConfig, "gda", exclude=("ascent",))
    if "sweep" in data:
        s = _section(data["sweep"], SweepSettings, "sweep")
        if s.grid_points < 2 or s.mean_samples < 1 or s.reference_states < 0:
            raise ConfigError("'sweep' needs grid_points >= 2, mean_samples >= 1, reference_states >= 0")
        kw["sweep"] = s
    if "output" in data:
        o = data["output"]
        if not isinstance(o, dict) or set(o) - {"csv", "json"}:
            raise ConfigError("'output' accepts only 'csv' and 'json'")
        kw["output"] = {"csv": o.get("csv"), "json": o.get("json")}
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    """Parse a config file; JSON syntax errors carry line and column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(data, path.parent)
