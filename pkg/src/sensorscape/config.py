"""Run configuration: a flat key/value file plus command-line overrides."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .dynamics import SimConfig
from .environments import DEFAULT_RADIUS, make_environments

MODELS = ("theoretical", "saturated")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "theoretical"
    radius: float = DEFAULT_RADIUS
    dt: Optional[float] = None  # None: model default
    steps: Optional[int] = None
    success_radius: float = 0.2
    distance_floor: float = 1e-3
    early_stop: bool = True
    v_max: float = 1.0
    omega_max: float = math.pi
    design_res: int = 9
    weights_res: int = 121
    workers: int = 1
    every: int = 10

    def sim_config(self) -> SimConfig:
        if self.model == "saturated":
            return SimConfig.saturated_defaults(
                dt=self.dt if self.dt is not None else 0.05,
                steps=self.steps if self.steps is not None else 2500,
                success_radius=self.success_radius, distance_floor=self.distance_floor,
                early_stop=self.early_stop, saturation=(self.v_max, self.omega_max))
        return SimConfig(
            dt=self.dt if self.dt is not None else 0.01,
            steps=self.steps if self.steps is not None else 100_000,
            success_radius=self.success_radius, distance_floor=self.distance_floor,
            early_stop=self.early_stop)

    def environments(self):
        return make_environments(self.radius, self.success_radius)

    def validate(self) -> "RunConfig":
        """Raise ConfigError unless every field is usable."""
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        for name in ("design_res", "weights_res"):
            if getattr(self, name) < 2:
                raise ConfigError(f"{name} must be >= 2")
        if self.design_res > 65535 or self.weights_res > 65535:
            raise ConfigError("grid resolution too large for the matrix dump format")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.every < 1:
            raise ConfigError("every must be >= 1")
        try:
            self.sim_config()
            self.environments()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, value):
    if value is None:
        return None
    kind = _TYPES[name]
    try:
        if "bool" in kind:
            if isinstance(value, str):
                low = value.strip().lower()
                if low not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                return low in ("true", "1", "yes")
            return bool(value)
        if "int" in kind:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if "float" in kind:
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name}: {value!r}") from None


def load_config_file(path) -> Dict[str, Any]:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected key: value pairs")
    return data


def build_config(file_values: Optional[Dict[str, Any]] = None,
                 overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Defaults, then file values, then overrides (which win)."""
    values: Dict[str, Any] = {}
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            name = key.replace("-", "_")
            if name not in _TYPES:
                raise ConfigError(f"unknown config key {key!r}")
            if value is not None:
                values[name] = _coerce(name, value)
    return replace(RunConfig(), **values).validate()
