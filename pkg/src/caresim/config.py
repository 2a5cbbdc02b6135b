"""Strict JSON config loading shared by the model, scenario, and weight files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Mapping


class ConfigError(ValueError):
    """A config document failed to parse or violated its schema."""


def load_json_document(path: str | Path) -> dict:
    """Parse a JSON config file, mapping parse failures onto ConfigError."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"top level of {path} must be a JSON object")
    return doc


def load_packaged_document(name: str) -> dict:
    """Load one of the default config documents shipped inside the package."""
    text = resources.files("caresim.data").joinpath(name).read_text(encoding="utf-8")
    return json.loads(text)


def reject_unknown_keys(doc: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {', '.join(sorted(unknown))}")


def require_probability(value: Any, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{where} must be in [0, 1], got {value}")
    return value
