"""Polygon ingestion, the shared lattice, and boundary-inclusive occupancy grids.

Lattice points sit at integer coordinates ``(i, j)`` with 1-based indices.
Axis 0 of every grid corresponds to the first vertex coordinate, axis 1 to
the second, so cell ``grid[i - 1, j - 1]`` describes the point ``(i, j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MARGIN = 5
# absolute tolerance on the cross-product on-edge test
EDGE_TOL = 1e-9


class GeometryError(ValueError):
    """Invalid polygon or curve input.

    ``vertex`` is the 0-based index of the offending vertex when one can be
    singled out, so file readers can map it back to a line number.
    """

    def __init__(self, message: str, vertex: int | None = None):
        super().__init__(message)
        self.vertex = vertex


def _as_vertex_array(vertices) -> np.ndarray:
    arr = np.asarray(vertices, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"expected an (n, 2) vertex list, got shape {arr.shape}")
    for k, (x, y) in enumerate(arr):
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"vertex {k} is not finite: ({x}, {y})", vertex=k)
        if x <= 0 or y <= 0:
            raise GeometryError(
                f"vertex {k} has a nonpositive coordinate: ({x:g}, {y:g})", vertex=k
            )
    return arr


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _orient(o, a, b) -> int:
    c = _cross(o[0], o[1], a[0], a[1], b[0], b[1])
    if abs(c) <= EDGE_TOL:
        return 0
    return 1 if c > 0 else -1


def _within_box(p, a, b) -> bool:
    return (
        min(a[0], b[0]) - EDGE_TOL <= p[0] <= max(a[0], b[0]) + EDGE_TOL
        and min(a[1], b[1]) - EDGE_TOL <= p[1] <= max(a[1], b[1]) + EDGE_TOL
    )


def segments_intersect(a, b, c, d) -> bool:
    """True if closed segments ab and cd share at least one point."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return (
        (o1 == 0 and _within_box(c, a, b))
        or (o2 == 0 and _within_box(d, a, b))
        or (o3 == 0 and _within_box(a, c, d))
        or (o4 == 0 and _within_box(b, c, d))
    )


@dataclass(frozen=True, eq=False)
class Polygon:
    """A simple closed polygon; the last vertex connects back to the first.

    A repeated closing vertex and consecutive duplicates are dropped. A
    collinear (zero-area) vertex list is accepted but flagged ``degenerate``.
    """

    vertices: np.ndarray
    degenerate: bool = field(default=False)
    # index into the caller's original vertex list for each kept vertex
    source_index: tuple[int, ...] = field(default=(), repr=False)

    @classmethod
    def from_vertices(cls, vertices: Iterable[Sequence[float]]) -> "Polygon":
        arr = _as_vertex_array(vertices)
        keep = [0] if len(arr) else []
        for k in range(1, len(arr)):
            if not np.array_equal(arr[k], arr[keep[-1]]):
                keep.append(k)
        while len(keep) > 1 and np.array_equal(arr[keep[-1]], arr[keep[0]]):
            keep.pop()
        if len(keep) < 3:
            raise GeometryError(
                f"a polygon needs at least 3 distinct vertices, got {len(keep)}"
            )
        verts = arr[keep].copy()
        verts.setflags(write=False)
        degenerate = all(_orient(verts[0], verts[1], v) == 0 for v in verts[2:])
        poly = cls(verts, degenerate, tuple(keep))
        if not degenerate:
            poly._check_simple()
        return poly

    @property
    def area(self) -> float:
        return abs(signed_area(self.vertices))

    @property
    def perimeter(self) -> float:
        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon.from_vertices(self.vertices + np.array([dx, dy]))

    def _check_simple(self) -> None:
        v = self.vertices
        n = len(v)
        edges = [(v[k], v[(k + 1) % n]) for k in range(n)]
        src = self.source_index
        for k in range(n):
            a, b = edges[k]
            # adjacent edge: only the shared vertex may coincide
            c = edges[(k + 1) % n][1]
            if _orient(a, b, c) == 0 and np.dot(a - b, c - b) > 0:
                raise GeometryError(
                    f"edges at vertex {src[(k + 1) % n]} fold back onto each other",
                    vertex=src[(k + 1) % n],
                )
            for m in range(k + 2, n):
                if k == 0 and m == n - 1:
                    continue
                if segments_intersect(a, b, *edges[m]):
                    raise GeometryError(
                        f"polygon self-intersects: edge from vertex {src[k]} "
                        f"crosses edge from vertex {src[m]}",
                        vertex=src[m],
                    )


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class GridSpec:
    I: int
    J: int
    margin: int = DEFAULT_MARGIN

    def __post_init__(self):
        if self.I < 1 or self.J < 1:
            raise ValueError(f"grid extents must be positive, got {self.I}x{self.J}")
        if self.margin < 0:
            raise ValueError("margin must be nonnegative")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.I, self.J)

    def enlarged(self, di: int, dj: int) -> "GridSpec":
        return GridSpec(self.I + di, self.J + dj, self.margin)

    def check_fits(self, points: np.ndarray, what: str = "polygon") -> None:
        hi_i = math.ceil(points[:, 0].max()) + self.margin
        hi_j = math.ceil(points[:, 1].max()) + self.margin
        if hi_i > self.I or hi_j > self.J:
            raise GeometryError(
                f"{what} needs a {hi_i}x{hi_j} grid (margin {self.margin}), "
                f"grid is {self.I}x{self.J}"
            )


def _points_of(shape) -> np.ndarray:
    if isinstance(shape, Polygon):
        return shape.vertices
    if hasattr(shape, "all_vertices"):
        return shape.all_vertices()
    return _as_vertex_array(shape)


def build_grid_spec(*shapes, margin: int = DEFAULT_MARGIN) -> GridSpec:
    """Smallest lattice covering every shape plus ``margin`` cells.

    Accepts polygons, curve sets, or raw vertex arrays.
    """
    if not shapes:
        raise ValueError("build_grid_spec needs at least one shape")
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    pts = [_points_of(s) for s in shapes]
    pts = [p for p in pts if len(p)]
    if not pts:
        raise ValueError("build_grid_spec got only empty shapes")
    allp = np.concatenate(pts)
    if (allp <= 0).any():
        raise GeometryError("coordinates must be > 0")
    return GridSpec(
        I=math.ceil(allp[:, 0].max()) + margin,
        J=math.ceil(allp[:, 1].max()) + margin,
        margin=margin,
    )


@dataclass(frozen=True, eq=False)
class BitGrid:
    cells: np.ndarray  # bool, shape (I, J)
    degenerate: bool = False

    @property
    def dims(self) -> tuple[int, int]:
        return self.cells.shape

    def __getitem__(self, ij: tuple[int, int]) -> int:
        """1-based lattice lookup."""
        i, j = ij
        return int(self.cells[i - 1, j - 1])


def lattice(g: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate arrays X (first coordinate) and Y, both shaped (I, J)."""
    return np.meshgrid(
        np.arange(1, g.I + 1, dtype=np.float64),
        np.arange(1, g.J + 1, dtype=np.float64),
        indexing="ij",
    )


def points_in_polygon(vertices: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Even-odd inclusion test, boundary-inclusive, vectorized over X, Y."""
    odd = np.zeros(X.shape, dtype=bool)
    on_edge = np.zeros(X.shape, dtype=bool)
    n = len(vertices)
    for k in range(n):
        x1, y1 = vertices[k]
        x2, y2 = vertices[(k + 1) % n]
        cross = _cross(x1, y1, x2, y2, X, Y)
        on_edge |= (
            (np.abs(cross) <= EDGE_TOL)
            & (X >= min(x1, x2) - EDGE_TOL)
            & (X <= max(x1, x2) + EDGE_TOL)
            & (Y >= min(y1, y2) - EDGE_TOL)
            & (Y <= max(y1, y2) + EDGE_TOL)
        )
        if y1 == y2:
            continue
        straddles = (y1 > Y) != (y2 > Y)
        x_hit = x1 + (Y - y1) * (x2 - x1) / (y2 - y1)
        odd ^= straddles & (X < x_hit)
    return odd | on_edge


def rasterize(p: Polygon, g: GridSpec) -> BitGrid:
    """Occupancy of lattice points inside or on the boundary of ``p``."""
    g.check_fits(p.vertices)
    if p.degenerate:
        return BitGrid(np.zeros(g.shape, dtype=bool), degenerate=True)
    X, Y = lattice(g)
    cells = points_in_polygon(p.vertices, X, Y)
    cells.setflags(write=False)
    return BitGrid(cells)
