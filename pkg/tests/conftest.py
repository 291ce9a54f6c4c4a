from __future__ import annotations

import json
from pathlib import Path

import pytest

from src.core.params import PhysParams


@pytest.fixture
def params() -> PhysParams:
    return PhysParams(alpha=19.0, gamma31=1.25, gamma41=1.25, gamma21=0.0)


@pytest.fixture
def write_config(tmp_path: Path):
    def _write(doc: dict, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(doc, indent=2), encoding="utf-8")
        return path

    return _write
