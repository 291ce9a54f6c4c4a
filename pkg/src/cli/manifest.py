from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from src.cli.io import write_json

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    """Record of one CLI run. config_snapshot alone is enough to rerun it."""

    subcommand: str
    config_snapshot: dict[str, Any]
    outputs: list[str] = field(default_factory=list)
    wall_clock_s: float = 0.0
    converged: dict[str, Optional[bool]] = field(default_factory=dict)

    @property
    def all_converged(self) -> bool:
        """False only when a check ran and failed; None marks a skipped check."""
        return all(v is not False for v in self.converged.values())

    @property
    def unchecked(self) -> list[str]:
        return [k for k, v in self.converged.items() if v is None]

    def write(self, out_dir: Path) -> Path:
        missing = [name for name in self.outputs if not (out_dir / name).exists()]
        if missing:
            raise FileNotFoundError(f"outputs listed in the manifest were not written: {missing}")
        return write_json(out_dir / MANIFEST_NAME, asdict(self))
