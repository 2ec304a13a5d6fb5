#!/usr/bin/env python3
"""Persistent truncation defaults and tolerances."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Dict, Optional

from klingen.evaluator import TruncationParams

SETTINGS_FILE = Path.home() / ".config" / "klingen-pullback" / "settings.json"

DEFAULT_SETTINGS: Dict[str, object] = {
    "coset_height": 40,
    "cd_bound": 6,
    "fourier_cutoff": 8,
    "qexp_order": 512,
    "grid_size": 8,
    "rankin_cutoff": 100000,
    "sym2_cutoff": 1000,
    "workers": 1,
    "prune_tol": 1e-22,
    "extraction_height": 1.2,
    "tolerance_pointwise": 1e-6,
    "tolerance_cor13": 1e-5,
    "tolerance_cor14": 1e-4,
    "tolerance_para": 1e-6,
}

TRUNCATION_KEYS = tuple(TruncationParams.__dataclass_fields__)


def _matches_default(key: str, value: object) -> bool:
    default = DEFAULT_SETTINGS[key]
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, int) and not isinstance(value, bool)


def coerce_setting(key: str, raw: str) -> object:
    """Parse a command-line value with the type of the key's default."""
    if key not in DEFAULT_SETTINGS:
        raise ValueError(f"unknown setting {key!r}; known: {', '.join(sorted(DEFAULT_SETTINGS))}")
    default = DEFAULT_SETTINGS[key]
    try:
        value: object = float(raw) if isinstance(default, float) else int(raw)
    except ValueError:
        raise ValueError(f"setting {key!r} expects {type(default).__name__}, got {raw!r}") from None
    if isinstance(value, (int, float)) and value <= 0 and key != "prune_tol":
        raise ValueError(f"setting {key!r} must be positive, got {raw!r}")
    return value


class SettingsStore:
    def __init__(self, settings_file: Optional[Path] = None) -> None:
        if settings_file is None:
            env_file = os.environ.get("KLINGEN_SETTINGS_FILE")
            settings_file = Path(env_file).expanduser() if env_file else SETTINGS_FILE
        self.settings_file = settings_file

    def load(self) -> Dict[str, object]:
        data: Dict[str, object] = {}
        if self.settings_file.exists():
            with self.settings_file.open("r", encoding="utf-8") as handle:
                try:
                    loaded = json.load(handle)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"{self.settings_file} is not valid JSON: {exc}") from exc
            if isinstance(loaded, dict):
                data = loaded
        for key, default in DEFAULT_SETTINGS.items():
            if key not in data or not _matches_default(key, data[key]):
                data[key] = default
            elif isinstance(default, float):
                data[key] = float(data[key])  # type: ignore[arg-type]
        return data

    def save(self, data: Dict[str, object]) -> None:
        self.settings_file.parent.mkdir(parents=True, exist_ok=True)
        with self.settings_file.open("w", encoding="utf-8") as handle:
            json.dump(data, handle, indent=2, sort_keys=True)
            handle.write("\n")
        self._harden_permissions()

    def set_value(self, key: str, raw: str) -> Dict[str, object]:
        value = coerce_setting(key, raw)
        data = self.load()
        data[key] = value
        self.save(data)
        return data

    def truncation(self, overrides: Optional[Dict[str, object]] = None) -> TruncationParams:
        """Stored settings with non-None overrides applied on top."""
        data = self.load()
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        return TruncationParams(**{key: data[key] for key in TRUNCATION_KEYS})

    def tolerance(self, claim: str) -> float:
        return float(self.load()[f"tolerance_{claim}"])  # type: ignore[arg-type]

    def _harden_permissions(self) -> None:
        try:
            os.chmod(self.settings_file, 0o600)
        except OSError:
            pass
