"""Structured (JSON) reports and flat CSV sample dumps."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Optional

from tsmono import __version__
from tsmono.monotonicity.verdict import _jsonable

SCHEMA = 1


def _echo(doc):
    """Make a scenario document JSON-safe (scale objects, tuples, floats)."""
    return _jsonable(json.loads(json.dumps(doc, default=str)))


def build_report(kind: str, scenario: dict, payload: dict, *, seed: Optional[int],
                 wall_time: float, tolerances: dict) -> dict:
    return {
        "schema": SCHEMA,
        "kind": kind,
        "version": __version__,
        "seed": seed,
        "scenario": _echo(scenario),
        "tolerances": tolerances,
        "result": payload,
        "wall_time": round(wall_time, 6),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(report: dict, path) -> None:
    Path(path).write_text(dumps(report))


def samples_to_csv(samples) -> str:
    """Two columns, ``s`` and ``value``; floats use repr so they round-trip."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "value"])
    for s, v in samples:
        w.writerow([repr(float(s)), repr(float(v))])
    return buf.getvalue()


def write_csv(samples, path) -> None:
    Path(path).write_text(samples_to_csv(samples))


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["s", "value"]:
        raise ValueError(f"{path}: expected header 's,value'")
    return [(float(s), float(v)) for s, v in rows[1:]]


def strip_wall_time(text: str) -> str:
    """Report text with the wall-time field blanked, for determinism checks."""
    doc = json.loads(text)
    doc["wall_time"] = None
    return dumps(doc)
