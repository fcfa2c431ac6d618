"""Strict flat configuration files.

Grammar, one entry per line::

    key = value            # trailing comments allowed
    list_key = 1 2 3       # lists are whitespace separated

Blank lines and lines starting with ``#`` are ignored. Keys must belong to
the schema of the selected scenario; an unknown or repeated key is an
error, so a misspelt tolerance can never fall back to a default silently.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidArgument


class ConfigError(InvalidArgument):
    """Malformed or unknown configuration entry."""


def parse_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key or not key.replace("_", "").replace("-", "").isalnum():
            raise ConfigError(f"line {n}: expected 'key = value', got {raw!r}")
        if key in entries:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        entries[key] = value.strip()
    return entries


def _coerce(template, raw: str, key: str):
    try:
        if isinstance(template, bool):
            if raw.lower() not in ("true", "false"):
                raise ValueError(raw)
            return raw.lower() == "true"
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
        if isinstance(template, tuple):
            kind = type(template[0]) if template else float
            return tuple(kind(v) for v in raw.split())
        return raw
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from exc


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return " ".join(_render(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully resolved scenario configuration.

    ``values`` holds every schema key of the scenario, defaults included,
    so the rendered text (and hence the hash) describes the run completely.
    """

    scenario: str
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def render(self) -> str:
        lines = [f"scenario = {self.scenario}"]
        lines += [f"{k} = {_render(self.values[k])}" for k in sorted(self.values)]
        return "\n".join(lines) + "\n"

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.render().encode()).hexdigest()[:16]

    def replace(self, **overrides) -> "ScenarioConfig":
        vals = dict(self.values)
        for k, v in overrides.items():
            if k not in vals:
                raise ConfigError(f"unknown key {k!r} for scenario {self.scenario!r}")
            vals[k] = v
        return ScenarioConfig(self.scenario, vals)


def resolve(scenario: str, schema: dict, entries: dict[str, str]) -> ScenarioConfig:
    """Apply string ``entries`` on top of ``schema`` defaults, rejecting unknown keys."""
    vals = dict(schema)
    for key, raw in entries.items():
        if key == "scenario":
            if raw != scenario:
                raise ConfigError(f"config is for scenario {raw!r}, not {scenario!r}")
            continue
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} for scenario {scenario!r}")
        vals[key] = _coerce(schema[key], raw, key)
    _validate(vals)
    return ScenarioConfig(scenario, vals)


def _validate(vals: dict):
    for key, v in vals.items():
        if key in ("n_steps", "replicates", "seeds") and int(v) < 1:
            raise ConfigError(f"{key} must be positive")
        if key in ("horizon", "dt", "delta", "bandwidth", "dx") and not float(v) > 0:
            raise ConfigError(f"{key} must be positive")
        if key.endswith("_ladder") or key == "deltas":
            seq = list(v)
            if len(seq) > 1 and not (all(a > b for a, b in zip(seq, seq[1:])) or all(a < b for a, b in zip(seq, seq[1:]))):
                raise ConfigError(f"{key} must be strictly monotone")


def load(path: str | Path) -> dict[str, str]:
    return parse_text(Path(path).read_text())
