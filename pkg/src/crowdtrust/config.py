"""Key-value configuration files and command-line overrides.

The format is flat ``key = value`` lines mirroring the simulation config
fields, with ``#`` comments; nested parameter groups use dotted keys
(``experience.alpha``, ``reputation.d``, ``trust.w1``) and integer ranges
are written ``lo,hi``. Every key is optional, unknown keys are errors,
and command-line ``--set`` overrides beat file values which beat defaults.
"""

from __future__ import annotations

from dataclasses import fields, replace

from .experience import ExperienceParams
from .reputation import ReputationParams
from .simulator import SimConfig
from .trust import TrustParams


class ConfigError(ValueError):
    """Malformed configuration file, key or value."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_range(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"expected 'lo,hi', got {text!r}")
    return int(parts[0]), int(parts[1])


_TOP_LEVEL = {
    "seed": int,
    "n_users": int,
    "malicious_fraction": float,
    "low_quality_fraction": float,
    "n_requests": int,
    "tasks_per_request": _parse_range,
    "participants_per_task": _parse_range,
    "scheme": str,
    "rep_recompute_every": int,
    "reputation_snapshot_every": int,
    "log_decisions": _parse_bool,
}

_GROUPS = {
    "experience": ExperienceParams,
    "reputation": ReputationParams,
    "trust": TrustParams,
}


def known_keys() -> list[str]:
    keys = list(_TOP_LEVEL)
    for group, cls in _GROUPS.items():
        keys.extend(f"{group}.{f.name}" for f in fields(cls))
    return keys


def parse_config_file(path) -> dict[str, str]:
    """Raw key -> value strings from a config file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def parse_overrides(pairs) -> dict[str, str]:
    """Raw key -> value strings from repeated KEY=VALUE arguments."""
    values: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override must look like key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def build_config(*value_maps: dict[str, str]) -> SimConfig:
    """Simulation config from defaults plus value maps, later maps winning."""
    merged: dict[str, str] = {}
    for values in value_maps:
        merged.update(values)

    top: dict[str, object] = {}
    groups: dict[str, dict[str, object]] = {name: {} for name in _GROUPS}
    for key, text in merged.items():
        try:
            if key in _TOP_LEVEL:
                top[key] = _TOP_LEVEL[key](text)
            elif "." in key:
                group, _, name = key.partition(".")
                cls = _GROUPS.get(group)
                if cls is None or name not in {f.name for f in fields(cls)}:
                    raise ConfigError(f"unknown config key {key!r}")
                caster = int if name == "max_iter" else float
                groups[group][name] = caster(text)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc

    try:
        config = SimConfig(**top)
        if groups["experience"]:
            config = replace(config, experience=ExperienceParams(**groups["experience"]))
        if groups["reputation"]:
            config = replace(config, reputation=ReputationParams(**groups["reputation"]))
        if groups["trust"]:
            config = replace(config, trust=TrustParams(**groups["trust"]))
        return replace(config)  # re-run validation with final nested params
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
