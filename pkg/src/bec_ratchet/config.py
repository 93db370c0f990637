"""TOML config loading and validation.

Configs use the field names of the model types directly (E1, E2, omega,
theta, t0, mu, v0, g, n_max, dt); steps_per_period is accepted in place of
dt. Validation gathers every offending key before reporting.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:           # Python 3.10
    import tomli as tomllib

from .model import DrivingField, ModelParams, params_for


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("config errors: " + "; ".join(self.errors))


def load_config(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _check(table: dict, key: str, types, errors, where):
    if key not in table:
        errors.append(f"missing key {where}.{key}")
        return None
    v = table[key]
    if not isinstance(v, types):
        errors.append(f"bad type for {where}.{key}: {type(v).__name__}")
        return None
    return v


def parse_field(cfg: dict, errors: list) -> DrivingField | None:
    sec = cfg.get("field")
    if not isinstance(sec, dict):
        errors.append("missing section [field]")
        return None
    e1 = _check(sec, "E1", (int, float), errors, "field")
    e2 = _check(sec, "E2", (int, float), errors, "field")
    om = _check(sec, "omega", (int, float), errors, "field")
    th = sec.get("theta", 0.0)
    t0 = sec.get("t0", 0.0)
    if errors or om is None or not om > 0:
        if om is not None and not om > 0:
            errors.append("field.omega must be positive")
        return None
    return DrivingField(E1=float(e1), E2=float(e2), omega=float(om),
                        theta=float(th), t0=float(t0))


def parse_model(cfg: dict, field: DrivingField | None, errors: list) -> ModelParams | None:
    sec = cfg.get("model")
    if not isinstance(sec, dict):
        errors.append("missing section [model]")
        return None
    mu = _check(sec, "mu", (int, float), errors, "model")
    v0 = sec.get("v0", 1.0)
    g = sec.get("g", 0.0)
    n_max = _check(sec, "n_max", int, errors, "model")
    if "dt" not in sec and "steps_per_period" not in sec:
        errors.append("model needs dt or steps_per_period")
    if errors or mu is None or n_max is None or field is None:
        return None
    try:
        if "dt" in sec:
            return ModelParams(mu=float(mu), v0=float(v0), g=float(g),
                               n_max=int(n_max), dt=float(sec["dt"]))
        return params_for(field, mu=float(mu), v0=float(v0), g=float(g),
                          n_max=int(n_max),
                          steps_per_period=int(sec["steps_per_period"]))
    except ValueError as exc:
        errors.append(str(exc))
        return None


def resolve(cfg: dict):
    """(field, params) or raise ConfigError listing every problem."""
    errors: list = []
    field = parse_field(cfg, errors)
    params = parse_model(cfg, field, errors)
    if errors:
        raise ConfigError(errors)
    return field, params


def grid_from(sec: dict, key: str, errors: list):
    """A grid is either an explicit list or {start, stop, num}."""
    spec = sec.get(key)
    if isinstance(spec, list):
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        try:
            import numpy as np
            return list(np.linspace(float(spec["start"]), float(spec["stop"]),
                                    int(spec["num"])))
        except (KeyError, TypeError, ValueError):
            errors.append(f"bad grid spec {key}: need start/stop/num")
            return None
    errors.append(f"missing or bad grid {key}")
    return None
