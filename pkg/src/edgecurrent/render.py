"""Grayscale PGM panel renderings of the pipeline stages.

Each panel is scaled on its own so that its maximum maps to 255 and zero to
0; panels are separated by white gutters.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .decompose import to_varifold
from .match import MatchResult, PreparedShape

GUTTER = 2
OUTPUT_FILES = {
    "fields_image": "fields.pgm",
    "smoothed_image": "smoothed.pgm",
    "match_image": "match.pgm",
}


def write_pgm(path: Path, img: np.ndarray) -> None:
    """Write an 8-bit binary (P5) PGM."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(img.tobytes())


def read_pgm(path: Path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM is supported")
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def scale_panel(a: np.ndarray) -> tuple[np.ndarray, float]:
    peak = float(a.max()) if a.size else 0.0
    if peak <= 0:
        return np.zeros(a.shape, dtype=np.uint8), 0.0
    return np.rint(np.clip(a, 0, None) * (255.0 / peak)).astype(np.uint8), peak


def tile(rows: Sequence[Sequence[np.ndarray]]) -> tuple[np.ndarray, list[list[float]]]:
    """Lay panels out row by row; returns the image and each panel's maximum."""
    ph = max(p.shape[0] for r in rows for p in r)
    pw = max(p.shape[1] for r in rows for p in r)
    ncols = max(len(r) for r in rows)
    img = np.full(
        (len(rows) * ph + (len(rows) - 1) * GUTTER, ncols * pw + (ncols - 1) * GUTTER),
        255,
        dtype=np.uint8,
    )
    peaks = []
    for ri, r in enumerate(rows):
        row_peaks = []
        for ci, p in enumerate(r):
            scaled, peak = scale_panel(p)
            y, x = ri * (ph + GUTTER), ci * (pw + GUTTER)
            img[y : y + p.shape[0], x : x + p.shape[1]] = scaled
            row_peaks.append(peak)
        peaks.append(row_peaks)
    return img, peaks


def _mask(s: PreparedShape) -> np.ndarray:
    if s.mask is not None:
        return s.mask.cells.astype(np.float64)
    # curve inputs have no interior; show their support instead
    return (sum(s.fields.components().values()) > 0).astype(np.float64)


def crop(a: np.ndarray, radius: int) -> np.ndarray:
    """Trim a full-convolution grid back onto the original lattice."""
    if radius == 0:
        return a
    return a[radius:-radius, radius:-radius]


def render_panels(
    result: MatchResult,
    shapes: tuple[PreparedShape, PreparedShape],
    which: Sequence[str],
    out_dir: Path,
    radius: int,
) -> dict[str, list[list[float]]]:
    """Write the requested images into ``out_dir``; returns panel maxima per file."""
    out_dir = Path(out_dir)
    masks = [_mask(s) for s in shapes]
    written = {}
    if "fields_image" in which:
        rows = []
        for s, m in zip(shapes, masks):
            if s.smoothed.kind == "unoriented":
                src = to_varifold(s.fields).components()
            else:
                src = s.fields.components()
            rows.append([2.0 * f + m for f in src.values()])
        written["fields_image"] = rows
    if "smoothed_image" in which:
        written["smoothed_image"] = [
            [crop(c, radius) + m for c in s.smoothed.components.values()]
            for s, m in zip(shapes, masks)
        ]
    if "match_image" in which:
        m1, m2 = masks
        em = crop(result.em, radius)
        written["match_image"] = [[m1, m2, m1 + 2.0 * m2, m1 + m2 + em, em]]
    scales = {}
    for key, rows in written.items():
        img, peaks = tile(rows)
        name = OUTPUT_FILES[key]
        write_pgm(out_dir / name, img)
        scales[name] = peaks
    return scales
