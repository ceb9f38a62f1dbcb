"""JSON and CSV output with round-trip exact floats."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Iterable

import numpy as np


def fmt(x) -> str:
    """Shortest decimal that parses back to the same double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj):
        return to_jsonable(asdict(obj))
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n"


def csv_text(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def matrices_csv(matrices: dict[str, np.ndarray], scalars: dict[str, Any] | None = None) -> str:
    """Long format ``name,row,col,value``; scalars leave row and col empty."""
    rows = []
    for name, M in matrices.items():
        M = np.atleast_2d(np.asarray(M, dtype=float))
        for i in range(M.shape[0]):
            for j in range(M.shape[1]):
                rows.append((name, i, j, float(M[i, j])))
    for name, v in (scalars or {}).items():
        if isinstance(v, (list, tuple, np.ndarray)):
            for k, item in enumerate(np.ravel(np.asarray(v, dtype=float))):
                rows.append((name, k, "", float(item)))
        elif isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool):
            rows.append((name, "", "", float(v)))
    return csv_text(("name", "row", "col", "value"), rows)


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
