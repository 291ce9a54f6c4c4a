"""Result files: CSV tables with '#' metadata headers, JSON summaries, data tables."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import pandas as pd

from src.core.errors import DataFileError

DATA_COLUMNS = ("alpha", "ds_um", "T_p", "T_s")


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def write_csv(path: Path, table: pd.DataFrame, metadata: Mapping[str, Any] | None = None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}: {json.dumps(_plain(value), ensure_ascii=False)}\n")
        table.to_csv(fh, index=False, float_format="%.15g")
    return path


def write_json(path: Path, payload: Mapping[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(dict(payload)), ensure_ascii=False, indent=2), encoding="utf-8")
    return path


def read_metadata(path: Path) -> dict[str, Any]:
    meta = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].partition(":")
        meta[key.strip()] = json.loads(value)
    return meta


def read_data_table(path: str | Path) -> pd.DataFrame:
    """Parse an observed-transmission CSV (alpha or ds_um, T_p and/or T_s).

    '#' lines are ignored. Every parse error names the offending file line.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{p} not found")
    lines = p.read_text(encoding="utf-8").splitlines()
    content_lines = [i + 1 for i, line in enumerate(lines) if line.strip() and not line.lstrip().startswith("#")]
    if not content_lines:
        raise DataFileError(f"{p}: no header line found")

    try:
        raw = pd.read_csv(p, comment="#", skip_blank_lines=True, dtype=str)
    except pd.errors.ParserError as e:
        raise DataFileError(f"{p}: {e}") from e

    columns = [c.strip() for c in raw.columns]
    unknown = [c for c in columns if c not in DATA_COLUMNS]
    if unknown:
        raise DataFileError(f"{p}: line {content_lines[0]}: unknown columns {unknown}; expected {DATA_COLUMNS}")
    if not any(c in columns for c in ("T_p", "T_s")):
        raise DataFileError(f"{p}: line {content_lines[0]}: need a T_p or T_s column")
    if "alpha" in columns and "ds_um" in columns:
        raise DataFileError(f"{p}: line {content_lines[0]}: give either alpha or ds_um, not both")
    raw.columns = columns

    table = pd.DataFrame(index=raw.index)
    for col in columns:
        values = pd.to_numeric(raw[col].str.strip(), errors="coerce")
        bad = values.isna() | ~np.isfinite(values.fillna(0.0))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise DataFileError(
                f"{p}: line {content_lines[row + 1]}: column {col} value {raw[col].iloc[row]!r} is not a finite number"
            )
        table[col] = values.astype(float)
    if table.empty:
        raise DataFileError(f"{p}: no data rows")
    return table.reset_index(drop=True)
