"""Flat key/value configuration: parsing, validation, canonical form.

The file format is one ``key = value`` pair per line with ``#`` comments.
Unknown keys are rejected, every value is validated against the module
preconditions before a run starts, and omitted keys fall back to the
standard sweep parameter set (2e6 pairs per point, 50-pair phase blocks,
x = 100000, d = 2000, gamma = 0.99, two ports, delay scale 1000 with
exponent 8 and window 1).
"""

from __future__ import annotations

import hashlib

from .detector import DelayConfig, DetectorConfig
from .experiment import (
    MODES,
    REACH_BOTH,
    REACH_TARGET,
    EfficiencyConfig,
    ExperimentConfig,
    SweepConfig,
    windowed_for,
)
from .geometry import Geometry
from .messenger import SourceConfig


class ConfigError(ValueError):
    """Malformed or invalid configuration; the message names the key."""


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> conversion from the raw string
_KEY_TYPES = {
    "mode": str,
    "n_tot": int,
    "window": float,
    "seed": int,
    "source.mode": str,
    "source.n_f": int,
    "source.reach": str,
    "source.frequency.mode": str,
    "source.frequency.pump": float,
    "source.frequency.dist": str,
    "source.frequency.width": float,
    "detector.k": int,
    "detector.gamma": float,
    "delay.enabled": _parse_bool,
    "delay.t_max": float,
    "delay.h": float,
    "geometry.x": float,
    "geometry.d": float,
    "sweep.y1_min": float,
    "sweep.y1_max": float,
    "sweep.steps": int,
    "efficiency.warmup": int,
    "efficiency.arrivals": int,
}

_CHOICES = {
    "mode": set(MODES),
    "source.mode": {"block-random", "fixed-phase"},
    "source.reach": {REACH_BOTH, REACH_TARGET},
    "source.frequency.mode": {"monochromatic", "pair-conserving"},
    "source.frequency.dist": {"gaussian", "lorentzian"},
}


def _read_pairs(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _convert(values: dict[str, str]) -> dict[str, object]:
    typed: dict[str, object] = {}
    for key, raw in values.items():
        try:
            typed[key] = _KEY_TYPES[key](raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from None
        if key in _CHOICES and typed[key] not in _CHOICES[key]:
            allowed = ", ".join(sorted(_CHOICES[key]))
            raise ConfigError(f"{key}: must be one of {allowed}")
    return typed


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def parse_config(
    text: str, overrides: dict[str, str] | None = None
) -> ExperimentConfig:
    """Parse and validate, returning a fully populated config.

    ``overrides`` are applied on top of the file contents before
    derivations run, so a command-line ``--mode`` behaves exactly like a
    ``mode = ...`` line.
    """
    values = _read_pairs(text)
    if overrides:
        for key, raw in overrides.items():
            if key not in _KEY_TYPES:
                raise ConfigError(f"unknown key {key!r}")
            values[key] = raw
    v = _convert(values)

    mode = v.get("mode", "hbt")
    windowed = windowed_for(mode)

    if mode == "nonmono" and "source.frequency.mode" not in v:
        v["source.frequency.mode"] = "pair-conserving"
    _require(
        not (mode == "nonmono" and v["source.frequency.mode"] == "monochromatic"),
        "source.frequency.mode: mode 'nonmono' requires pair-conserving frequencies",
    )
    if "delay.enabled" not in v:
        v["delay.enabled"] = windowed
    _require(
        not (windowed and not v["delay.enabled"]),
        f"delay.enabled: mode {mode!r} compares click timestamps and needs the delay stage",
    )

    _require(v.get("n_tot", 2_000_000) >= 1, "n_tot: must be at least 1")
    _require(v.get("window", 1.0) > 0, "window: must be positive")
    _require(v.get("source.n_f", 50) >= 1, "source.n_f: must be at least 1")
    _require(
        v.get("source.frequency.pump", 2.0) > 0,
        "source.frequency.pump: must be positive",
    )
    _require(
        v.get("source.frequency.width", 0.02) > 0,
        "source.frequency.width: must be positive",
    )
    _require(v.get("detector.k", 2) >= 1, "detector.k: must be at least 1")
    _require(
        not (mode != "efficiency" and v.get("detector.k", 2) < 2),
        "detector.k: sweep modes address one port per source and need k >= 2",
    )
    _require(
        0.0 <= v.get("detector.gamma", 0.99) < 1.0,
        "detector.gamma: must lie in [0, 1)",
    )
    _require(v.get("delay.t_max", 1000.0) > 0, "delay.t_max: must be positive")
    _require(v.get("delay.h", 8.0) > 0, "delay.h: must be positive")
    _require(v.get("geometry.x", 100000.0) > 0, "geometry.x: must be positive")
    _require(v.get("geometry.d", 2000.0) > 0, "geometry.d: must be positive")
    _require(v.get("sweep.steps", 41) >= 1, "sweep.steps: must be at least 1")
    _require(
        v.get("sweep.y1_min", -100.0) <= v.get("sweep.y1_max", 100.0),
        "sweep.y1_min: must not exceed sweep.y1_max",
    )
    _require(v.get("efficiency.warmup", 1000) >= 0, "efficiency.warmup: must be >= 0")
    _require(
        v.get("efficiency.arrivals", 10000) >= 1,
        "efficiency.arrivals: must be at least 1",
    )

    return ExperimentConfig(
        mode=mode,
        n_tot=v.get("n_tot", 2_000_000),
        window=v.get("window", 1.0),
        seed=v.get("seed", 12345),
        reach=v.get("source.reach", REACH_BOTH),
        source=SourceConfig(
            mode=v.get("source.mode", "block-random"),
            n_f=v.get("source.n_f", 50),
            frequency_mode=v.get("source.frequency.mode", "monochromatic"),
            pump=v.get("source.frequency.pump", 2.0),
            dist=v.get("source.frequency.dist", "gaussian"),
            width=v.get("source.frequency.width", 0.02),
        ),
        detector=DetectorConfig(
            k=v.get("detector.k", 2), gamma=v.get("detector.gamma", 0.99)
        ),
        delay=DelayConfig(
            enabled=v["delay.enabled"],
            t_max=v.get("delay.t_max", 1000.0),
            h=v.get("delay.h", 8.0),
        ),
        geometry=Geometry(
            x=v.get("geometry.x", 100000.0), d=v.get("geometry.d", 2000.0)
        ),
        sweep=SweepConfig(
            y1_min=v.get("sweep.y1_min", -100.0),
            y1_max=v.get("sweep.y1_max", 100.0),
            steps=v.get("sweep.steps", 41),
        ),
        efficiency=EfficiencyConfig(
            warmup=v.get("efficiency.warmup", 1000),
            arrivals=v.get("efficiency.arrivals", 10000),
        ),
    )


def default_config(mode: str = "hbt") -> ExperimentConfig:
    """The standard parameter set for the given mode."""
    return parse_config("", overrides={"mode": mode})


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form: every effective key, sorted, one per line."""
    c = config
    values = {
        "mode": c.mode,
        "n_tot": c.n_tot,
        "window": c.window,
        "seed": c.seed,
        "source.mode": c.source.mode,
        "source.n_f": c.source.n_f,
        "source.reach": c.reach,
        "source.frequency.mode": c.source.frequency_mode,
        "source.frequency.pump": c.source.pump,
        "source.frequency.dist": c.source.dist,
        "source.frequency.width": c.source.width,
        "detector.k": c.detector.k,
        "detector.gamma": c.detector.gamma,
        "delay.enabled": "true" if c.delay.enabled else "false",
        "delay.t_max": c.delay.t_max,
        "delay.h": c.delay.h,
        "geometry.x": c.geometry.x,
        "geometry.d": c.geometry.d,
        "sweep.y1_min": c.sweep.y1_min,
        "sweep.y1_max": c.sweep.y1_max,
        "sweep.steps": c.sweep.steps,
        "efficiency.warmup": c.efficiency.warmup,
        "efficiency.arrivals": c.efficiency.arrivals,
    }
    return "\n".join(f"{key} = {values[key]}" for key in sorted(values)) + "\n"


def config_digest(config: ExperimentConfig) -> str:
    """Short hash that changes iff an effective parameter changes."""
    return hashlib.sha256(serialize_config(config).encode()).hexdigest()[:12]
