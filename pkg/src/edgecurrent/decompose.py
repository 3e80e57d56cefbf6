"""Directional boundary fields from occupancy grids and from oriented curves.

Field names follow the display orientation of a grid (axis 0 runs down,
axis 1 runs right):

    T  top edges,     traversed with decreasing axis-1 index
    B  bottom edges,  traversed with increasing axis-1 index
    L  left edges,    traversed with increasing axis-0 index
    R  right edges,   traversed with decreasing axis-0 index

A boundary walked counterclockwise in the (first, second) coordinate plane
therefore lands every step in the same field as the occupancy difference of
the enclosed region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .raster import BitGrid, GeometryError, GridSpec, _as_vertex_array

ORIENTED = ("T", "B", "L", "R")
UNORIENTED = ("H", "V")

# unit step (d_axis0, d_axis1) -> field
STEP_FIELD = {(0, -1): "T", (0, 1): "B", (1, 0): "L", (-1, 0): "R"}


@dataclass(frozen=True, eq=False)
class EdgeField:
    T: np.ndarray
    B: np.ndarray
    L: np.ndarray
    R: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return self.T.shape

    def components(self) -> dict[str, np.ndarray]:
        return {"T": self.T, "B": self.B, "L": self.L, "R": self.R}

    @classmethod
    def zeros(cls, shape: tuple[int, int]) -> "EdgeField":
        return cls(*(np.zeros(shape) for _ in ORIENTED))


@dataclass(frozen=True, eq=False)
class VarifoldField:
    """Unoriented horizontal (H) and vertical (V) component densities."""

    V: np.ndarray
    H: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return self.H.shape

    def components(self) -> dict[str, np.ndarray]:
        return {"H": self.H, "V": self.V}


def difference_fields(m: BitGrid | np.ndarray) -> EdgeField:
    """Mark inside cells whose neighbour in each axis direction is empty.

    Cells beyond the grid count as empty, which coincides with the
    "first row is never a top edge" rule whenever the border is clear.
    """
    cells = np.asarray(m.cells if isinstance(m, BitGrid) else m, dtype=bool)
    p = np.pad(cells, 1)
    inner = p[1:-1, 1:-1]
    return EdgeField(
        T=(inner & ~p[:-2, 1:-1]).astype(np.float64),
        B=(inner & ~p[2:, 1:-1]).astype(np.float64),
        L=(inner & ~p[1:-1, :-2]).astype(np.float64),
        R=(inner & ~p[1:-1, 2:]).astype(np.float64),
    )


@dataclass(frozen=True, eq=False)
class Curve:
    vertices: np.ndarray
    closed: bool = False


@dataclass(frozen=True, eq=False)
class OrientedCurveSet:
    curves: tuple[Curve, ...]

    @classmethod
    def from_lists(
        cls, curves: Iterable[tuple[Sequence[Sequence[float]], bool]]
    ) -> "OrientedCurveSet":
        out = []
        for n, (verts, closed) in enumerate(curves):
            arr = _as_vertex_array(verts)
            if len(arr) < 2:
                raise GeometryError(f"curve {n} needs at least 2 vertices, got {len(arr)}")
            arr.setflags(write=False)
            out.append(Curve(arr, bool(closed)))
        return cls(tuple(out))

    def all_vertices(self) -> np.ndarray:
        if not self.curves:
            return np.zeros((0, 2))
        return np.concatenate([c.vertices for c in self.curves])


def snap(x: float) -> int:
    """Nearest lattice coordinate, halves rounding up."""
    return math.floor(x + 0.5)


def lattice_walk(a: tuple[int, int], b: tuple[int, int]) -> list[tuple[int, int]]:
    """4-connected unit steps from lattice point ``a`` to ``b``.

    Each step keeps the walk closest to the straight segment; when an
    axis-1 (horizontal) and an axis-0 (vertical) step tie, the horizontal
    one goes first.
    """
    di, dj = b[0] - a[0], b[1] - a[1]
    nv, nh = abs(di), abs(dj)
    sv, sh = (1 if di > 0 else -1), (1 if dj > 0 else -1)
    steps = []
    iv = ih = 0
    while iv < nv or ih < nh:
        # compare (ih + 1/2) / nh with (iv + 1/2) / nv without division
        if (1 + 2 * ih) * nv <= (1 + 2 * iv) * nh:
            steps.append((0, sh))
            ih += 1
        else:
            steps.append((sv, 0))
            iv += 1
    return steps


def _curve_steps(curve: Curve, n: int) -> tuple[tuple[int, int], list[tuple[int, int]]]:
    pts = [(snap(x), snap(y)) for x, y in curve.vertices]
    for k, p in enumerate(pts):
        if p[0] < 1 or p[1] < 1:
            raise GeometryError(f"curve {n} vertex {k} snaps outside the grid at {p}", vertex=k)
    if curve.closed:
        pts.append(pts[0])
    steps = []
    for a, b in zip(pts, pts[1:]):
        steps.extend(lattice_walk(a, b))
    return pts[0], steps


def rasterize_oriented_curves(c: OrientedCurveSet, g: GridSpec) -> EdgeField:
    """Accumulate each lattice point a curve visits into the fields of the
    steps entering and leaving it.

    A visit whose incoming and outgoing steps share a field counts once, so
    a straight run marks each cell once and a corner marks both fields, as
    occupancy differences do. Repeated visits and overlapping curves add.
    """
    out = {k: np.zeros(g.shape) for k in ORIENTED}
    for n, curve in enumerate(c.curves):
        g.check_fits(curve.vertices, what=f"curve {n}")
        start, steps = _curve_steps(curve, n)
        if not steps:
            continue
        pos = start
        m = len(steps)
        # a closed walk revisits its start as the last arrival; skip that duplicate
        visits = m if curve.closed else m + 1
        for k in range(visits):
            fields = set()
            if k > 0 or curve.closed:
                fields.add(STEP_FIELD[steps[k - 1]])
            if k < m:
                fields.add(STEP_FIELD[steps[k]])
            for f in fields:
                out[f][pos[0] - 1, pos[1] - 1] += 1.0
            if k < m:
                pos = (pos[0] + steps[k][0], pos[1] + steps[k][1])
    return EdgeField(**out)


def to_varifold(e: EdgeField) -> VarifoldField:
    return VarifoldField(V=e.L + e.R, H=e.T + e.B)
