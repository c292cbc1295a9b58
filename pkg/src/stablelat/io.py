"""Columnar text files with a '#'-prefixed JSON manifest line.

    # {"kind": ..., ...}
    name1,name2,...
    v11,v12,...

Floats are written with 17 significant digits so files round-trip exactly
and identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def dumps_header(header: dict) -> str:
    return json.dumps(header, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_table(path, header: dict, names: list[str], columns: list[np.ndarray]) -> None:
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0]) if columns else 0
    lines = ["# " + dumps_header(header), ",".join(names)]
    ints = [np.issubdtype(c.dtype, np.integer) for c in columns]
    for i in range(n):
        lines.append(",".join(str(int(c[i])) if is_int else repr(float(c[i]))
                              for c, is_int in zip(columns, ints)))
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path) -> tuple[dict, list[str], list[np.ndarray]]:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("# "):
        raise ValueError(f"{path}: missing manifest header")
    header = json.loads(text[0][2:])
    names = text[1].split(",") if len(text) > 1 and text[1] else []
    rows = [line.split(",") for line in text[2:] if line]
    cols = [np.array([float(r[j]) for r in rows]) for j in range(len(names))]
    return header, names, cols


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def write_records(path, header: dict, records: list[dict]) -> None:
    """Flat table of homogeneous records (numbers, strings, booleans)."""
    names = list(records[0]) if records else []
    with open(path, "w", newline="") as fh:
        fh.write("# " + dumps_header(header) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for rec in records:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in
                             (rec[k] for k in names)])


def read_records(path) -> tuple[dict, list[dict]]:
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing manifest header")
        header = json.loads(first[2:])
        return header, list(csv.DictReader(fh))
