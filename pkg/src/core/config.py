"""Load, override and validate JSON run configurations."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from pydantic import ValidationError

from src.core.errors import ConfigError
from src.core.params import PROFILE_KINDS, PhysParams
from src.core.schemas import (
    FitSpec,
    GridSpec,
    ProfileSpec,
    PulseSpecModel,
    RunConfig,
    SweepSpec,
)


@dataclass(frozen=True)
class ValidatedConfig:
    params: PhysParams
    profile: Optional[ProfileSpec]
    grid: GridSpec
    omega_p0: float
    pulse: Optional[PulseSpecModel]
    sweep: Optional[SweepSpec]
    fit: Optional[FitSpec]
    snapshot: dict[str, Any]

    def require_profile(self) -> ProfileSpec:
        if self.profile is None:
            raise ConfigError("missing required key: profile")
        return self.profile


def _format_errors(exc: ValidationError) -> str:
    messages = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"])
        if err["type"] == "missing":
            messages.append(f"missing required key: {loc}")
        else:
            msg = str(err["msg"]).removeprefix("Value error, ")
            messages.append(f"{loc}: {msg}" if loc else msg)
    return "; ".join(messages)


def validate_config(raw: Mapping[str, Any]) -> ValidatedConfig:
    """Check a parsed configuration document and apply defaults."""
    profile = raw.get("profile")
    if isinstance(profile, Mapping) and profile.get("kind") not in PROFILE_KINDS:
        raise ConfigError(f"unknown profile kind {profile.get('kind')!r}; expected one of {PROFILE_KINDS}")

    try:
        cfg = RunConfig.model_validate(dict(raw))
    except ValidationError as e:
        raise ConfigError(_format_errors(e)) from e

    params = PhysParams(
        alpha=cfg.alpha,
        gamma31=cfg.gamma31,
        gamma41=cfg.gamma41,
        gamma21=cfg.gamma21,
        length_mm=cfg.length_mm,
        gamma_unit_hz=cfg.gamma_unit_hz,
    )
    return ValidatedConfig(
        params=params,
        profile=cfg.profile,
        grid=cfg.grid,
        omega_p0=cfg.omega_p0,
        pulse=cfg.pulse,
        sweep=cfg.sweep,
        fit=cfg.fit,
        snapshot=cfg.model_dump(mode="json", exclude_none=True),
    )


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a JSON config. A run manifest is accepted too: its snapshot is returned."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{p} not found")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    if "config_snapshot" in doc:
        return doc["config_snapshot"]
    return doc


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: Mapping[str, Any], assignments: Iterable[str]) -> dict[str, Any]:
    """Apply dotted-path assignments such as ``profile.delta_s_um=54``."""
    doc = copy.deepcopy(dict(raw))
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key.path=value")
        path, text = item.split("=", 1)
        keys = [k for k in path.strip().split(".") if k]
        if not keys:
            raise ConfigError(f"override {item!r} has an empty key path")

        node = doc
        for key in keys[:-1]:
            child = node.get(key)
            if child is None:
                child = {}
                node[key] = child
            if not isinstance(child, dict):
                raise ConfigError(f"override {item!r}: {key} is not a section")
            node = child
        node[keys[-1]] = _parse_value(text.strip())
    return doc
