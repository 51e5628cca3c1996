"""Locale-independent numeric formatting and CSV/JSON writers."""

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def fmt(value: float) -> str:
    """Shortest round-trip decimal representation of a float."""
    return repr(float(value))


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows to CSV; floats are written with round-trip precision."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [fmt(v) if isinstance(v, (float, np.floating)) else v for v in row]
            )
    return out


def to_jsonable(value: Any) -> Any:
    """Convert numpy containers and scalars into plain JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if np.isnan(v) or np.isinf(v):
            return None
        return v
    if hasattr(value, 'value') and isinstance(getattr(value, 'value'), str):
        return value.value
    return value


def write_json(path: str, payload: Any) -> Path:
    """Write a payload as deterministic, sorted JSON."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, 'w', encoding='utf-8') as f:
        json.dump(to_jsonable(payload), f, indent=2, sort_keys=True)
        f.write('\n')
    return out
