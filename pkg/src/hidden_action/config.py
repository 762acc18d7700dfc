"""Run configuration files.

A configuration is flat ``key = value`` text (TOML syntax). The experiment
axes (``delta``, ``m``, ``lambda_frac``, ``sigma_frac``) take a single value
or a list; everything else is scalar. Keys left out keep their defaults, so
an empty file describes the full 108-scenario grid.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .decision import FIXED, REOPTIMIZE
from .engine import GRID_AXES, ConfigError, ScenarioConfig, _on_grid, scenario_grid
from .model import ActorParams, DomainError

# file key -> ScenarioConfig axis name
AXIS_KEYS = {
    "delta": "delta",
    "m": "m",
    "lambda_frac": "local_fraction",
    "sigma_frac": "sigma_fraction",
}
ACTOR_KEYS = ("rho", "eta", "reservation_utility")
SCALAR_KEYS = ("T", "R", "master_seed", "literal_threshold", "candidate_premium", "allow_offgrid")
KNOWN_KEYS = (*AXIS_KEYS, *ACTOR_KEYS, *SCALAR_KEYS)


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all scenarios plus the values of each experiment axis."""

    base: ScenarioConfig = ScenarioConfig()
    axes: dict[str, tuple] = field(default_factory=lambda: dict(GRID_AXES))

    def scenarios(self) -> list[ScenarioConfig]:
        return scenario_grid(self.base, **self.axes)

    def restrict(self, axis: str, values) -> RunConfig:
        """Intersect one axis with ``values``; values absent from the axis are an error."""
        current = self.axes[axis]
        kept = tuple(v for v in current if any(_same(v, w) for w in values))
        missing = [w for w in values if not any(_same(v, w) for v in current)]
        if missing:
            raise ConfigError(f"filter {axis}={_show(missing)} selects nothing from {_show(current)}")
        return replace(self, axes={**self.axes, axis: kept})


def _same(a: float, b: float) -> bool:
    return a == b or math.isclose(a, b, rel_tol=1e-9)


def _show(values) -> str:
    return "{" + ", ".join("inf" if math.isinf(v) else f"{v:g}" for v in values) + "}"


def parse_number(key: str, value) -> float:
    """Numbers may be written as ``0.2``, ``"1/5"`` or ``inf``."""
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity"):
            return math.inf
        try:
            return float(Fraction(text))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"{key} must be a number, got {value!r}")


def _line_of(text: str, key: str) -> int | None:
    pattern = re.compile(rf"^\s*[\"']?{re.escape(key)}[\"']?\s*=")
    for i, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return i
    return None


def _where(text: str, key: str) -> str:
    line = _line_of(text, key)
    return f" (line {line})" if line else ""


def parse_config_text(text: str) -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc

    for key, value in raw.items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}{_where(text, key)}; "
                              f"expected one of {', '.join(KNOWN_KEYS)}")
        if isinstance(value, dict):
            raise ConfigError(f"{key}{_where(text, key)}: tables are not supported")
        if isinstance(value, list) and key not in AXIS_KEYS:
            raise ConfigError(f"{key}{_where(text, key)} takes a single value")

    allow_offgrid = raw.get("allow_offgrid", False)
    if not isinstance(allow_offgrid, bool):
        raise ConfigError(f"allow_offgrid{_where(text, 'allow_offgrid')} must be true or false")

    axes = dict(GRID_AXES)
    for key, axis in AXIS_KEYS.items():
        if key not in raw:
            continue
        items = raw[key] if isinstance(raw[key], list) else [raw[key]]
        if not items:
            raise ConfigError(f"{key}{_where(text, key)} must not be empty")
        values = tuple(parse_number(key, v) for v in items)
        if not allow_offgrid:
            for v in values:
                if not _on_grid(v, GRID_AXES[axis]):
                    raise ConfigError(f"{key} = {v:g}{_where(text, key)} is outside the experiment "
                                      f"grid {_show(GRID_AXES[axis])}; set allow_offgrid = true to override")
        axes[axis] = values

    try:
        actor = ActorParams(**{k: parse_number(k, raw[k]) for k in ACTOR_KEYS if k in raw})
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    settings = {"actor": actor, "allow_offgrid": allow_offgrid}
    for key in ("T", "R", "master_seed"):
        if key in raw:
            value = raw[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key}{_where(text, key)} must be an integer, got {value!r}")
            if value < (0 if key == "master_seed" else 1):
                raise ConfigError(f"{key} = {value}{_where(text, key)} is out of range")
            settings[key] = value
    if "literal_threshold" in raw:
        if not isinstance(raw["literal_threshold"], bool):
            raise ConfigError(f"literal_threshold{_where(text, 'literal_threshold')} must be true or false")
        settings["literal_threshold"] = raw["literal_threshold"]
    if "candidate_premium" in raw:
        if raw["candidate_premium"] not in (REOPTIMIZE, FIXED):
            raise ConfigError(f"candidate_premium{_where(text, 'candidate_premium')} must be "
                              f"{REOPTIMIZE!r} or {FIXED!r}")
        settings["candidate_premium"] = raw["candidate_premium"]

    base = ScenarioConfig(**settings)
    cfg = RunConfig(base, axes)
    cfg.scenarios()  # surface any remaining validation error now
    return cfg


def parse_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text())
