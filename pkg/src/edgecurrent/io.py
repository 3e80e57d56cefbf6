"""Polygon / curve file readers and report writers."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .decompose import OrientedCurveSet
from .raster import GeometryError, Polygon

REPORT_SCHEMA = 1


class InputError(ValueError):
    """Unreadable or invalid input file; message names the offending line."""


def _parse_csv(path: Path) -> tuple[list[tuple[float, float]], list[int]]:
    verts, lines = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise InputError(f"{path}:{lineno}: expected 'x,y', got {','.join(row)!r}")
            try:
                verts.append((float(row[0]), float(row[1])))
            except ValueError:
                raise InputError(
                    f"{path}:{lineno}: vertex is not numeric: {','.join(row)!r}"
                ) from None
            lines.append(lineno)
    return verts, lines


def _json_vertices(raw, where: str) -> list[tuple[float, float]]:
    if not isinstance(raw, list):
        raise InputError(f"{where}: 'vertices' must be a list")
    out = []
    for k, v in enumerate(raw):
        if (
            not isinstance(v, list)
            or len(v) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)
        ):
            raise InputError(f"{where}: vertex {k} must be [x, y], got {v!r}")
        out.append((float(v[0]), float(v[1])))
    return out


def _load_json(path: Path) -> dict:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    return doc


def read_polygon(path: str | Path) -> Polygon:
    """Read a polygon from a vertex CSV (``x,y`` per line) or JSON file."""
    path = Path(path)
    try:
        text_start = path.read_text(encoding="utf-8").lstrip()[:1]
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from None
    if path.suffix.lower() == ".json" or text_start == "{":
        doc = _load_json(path)
        if "vertices" not in doc:
            raise InputError(f"{path}: missing 'vertices'")
        verts = _json_vertices(doc["vertices"], str(path))
        where = [f"{path}: vertex {k}" for k in range(len(verts))]
    else:
        verts, lines = _parse_csv(path)
        where = [f"{path}:{n}" for n in lines]
    if not verts:
        raise InputError(f"{path}: no vertices")
    try:
        return Polygon.from_vertices(verts)
    except GeometryError as exc:
        if exc.vertex is not None:
            raise InputError(f"{where[exc.vertex]}: {exc}") from None
        raise InputError(f"{path}: {exc}") from None


def read_curves(path: str | Path) -> OrientedCurveSet:
    """Read ``{"curves": [{"vertices": [[x, y], ...], "closed": bool}, ...]}``."""
    path = Path(path)
    try:
        doc = _load_json(path)
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from None
    curves = doc.get("curves")
    if not isinstance(curves, list):
        raise InputError(f"{path}: 'curves' must be a list")
    parsed = []
    for n, c in enumerate(curves):
        if not isinstance(c, dict) or "vertices" not in c:
            raise InputError(f"{path}: curve {n} must be an object with 'vertices'")
        closed = c.get("closed", False)
        if not isinstance(closed, bool):
            raise InputError(f"{path}: curve {n} 'closed' must be true or false")
        parsed.append((_json_vertices(c["vertices"], f"{path}: curve {n}"), closed))
    try:
        return OrientedCurveSet.from_lists(parsed)
    except GeometryError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_report(path: Path, report: dict) -> None:
    report = {"schema": REPORT_SCHEMA, **report}
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_em_csv(path: Path, em: np.ndarray) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        for row in em:
            fh.write(",".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def read_em_csv(path: Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)
