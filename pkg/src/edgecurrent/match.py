"""Edge-match density, score and induced distance between two shapes."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .decompose import (
    EdgeField,
    OrientedCurveSet,
    difference_fields,
    rasterize_oriented_curves,
    to_varifold,
)
from .raster import DEFAULT_MARGIN, BitGrid, GridSpec, Polygon, build_grid_spec, rasterize
from .smooth import (
    DEFAULT_PEAK_DIVISOR,
    DEFAULT_SIGMA,
    DEFAULT_SIZE,
    Kernel,
    SmoothedField,
    gaussian_kernel,
    smooth_edge_field,
)

VARIANTS = ("oriented", "unoriented")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MatchConfig:
    kernel_size: int = DEFAULT_SIZE
    sigma: float = DEFAULT_SIGMA
    # None: divide by the exact kernel centre weight
    peak_divisor: float | None = DEFAULT_PEAK_DIVISOR
    margin: int = DEFAULT_MARGIN
    variant: str = "oriented"

    def __post_init__(self):
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ConfigError(f"kernel size must be a positive odd integer, got {self.kernel_size}")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.peak_divisor is not None and not self.peak_divisor > 0:
            raise ConfigError(f"peak divisor must be positive, got {self.peak_divisor}")
        need = (self.kernel_size - 1) // 2 + 1
        if self.margin < need:
            raise ConfigError(
                f"margin {self.margin} is too small for a {self.kernel_size}x"
                f"{self.kernel_size} kernel (need >= {need})"
            )
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    def kernel(self) -> Kernel:
        return gaussian_kernel(self.kernel_size, self.sigma, self.peak_divisor)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["peak_divisor"] is None:
            d["peak_divisor"] = "center"
        return d


@dataclass(frozen=True, eq=False)
class MatchResult:
    score: float
    em: np.ndarray
    # EMT/EMB/EML/EMR, or EMH/EMV for the unoriented variant
    components: dict[str, np.ndarray] = field(repr=False)


@dataclass(frozen=True)
class DistanceResult:
    d: float
    e11: float
    e22: float
    e12: float

    @property
    def negative(self) -> bool:
        return self.d < 0


@dataclass(frozen=True, eq=False)
class PreparedShape:
    """Intermediate grids of one shape's pipeline, kept for rendering."""

    fields: EdgeField
    smoothed: SmoothedField
    mask: BitGrid | None = None


def total(a: np.ndarray) -> float:
    # correctly rounded, hence independent of summation order
    return math.fsum(a.ravel().tolist())


def match_fields(s1: SmoothedField, s2: SmoothedField) -> MatchResult:
    """Pointwise like-type products combined as a Euclidean norm of the
    horizontal (T+B or H) and vertical (L+R or V) parts."""
    if s1.dims != s2.dims:
        raise ValueError(f"smoothed field dimensions differ: {s1.dims} vs {s2.dims}")
    if set(s1.components) != set(s2.components):
        raise ValueError(f"cannot match {s1.kind} fields against {s2.kind} fields")
    prods = {"EM" + k: s1[k] * s2[k] for k in s1.components}
    if s1.kind == "unoriented":
        horiz, vert = prods["EMH"], prods["EMV"]
    else:
        horiz = prods["EMT"] + prods["EMB"]
        vert = prods["EML"] + prods["EMR"]
    em = np.sqrt(horiz * horiz + vert * vert)
    em.setflags(write=False)
    return MatchResult(total(em), em, prods)


def varifold_match(v1: SmoothedField, v2: SmoothedField) -> MatchResult:
    if v1.kind != "unoriented" or v2.kind != "unoriented":
        raise ValueError("varifold_match needs smoothed H/V fields")
    return match_fields(v1, v2)


def _finish(fields: EdgeField, cfg: MatchConfig, kern: Kernel, mask=None) -> PreparedShape:
    src = to_varifold(fields) if cfg.variant == "unoriented" else fields
    return PreparedShape(fields, smooth_edge_field(src, kern), mask)


def prepare_polygon(p: Polygon, g: GridSpec, cfg: MatchConfig, kern: Kernel | None = None) -> PreparedShape:
    m = rasterize(p, g)
    return _finish(difference_fields(m), cfg, kern or cfg.kernel(), m)


def prepare_curves(
    c: OrientedCurveSet, g: GridSpec, cfg: MatchConfig, kern: Kernel | None = None
) -> PreparedShape:
    return _finish(rasterize_oriented_curves(c, g), cfg, kern or cfg.kernel())


def edge_match(p1: Polygon, p2: Polygon, cfg: MatchConfig | None = None) -> MatchResult:
    cfg = cfg or MatchConfig()
    g = build_grid_spec(p1, p2, margin=cfg.margin)
    kern = cfg.kernel()
    return match_fields(
        prepare_polygon(p1, g, cfg, kern).smoothed,
        prepare_polygon(p2, g, cfg, kern).smoothed,
    )


def curve_match(
    c1: OrientedCurveSet, c2: OrientedCurveSet, cfg: MatchConfig | None = None
) -> MatchResult:
    cfg = cfg or MatchConfig()
    g = build_grid_spec(c1, c2, margin=cfg.margin)
    kern = cfg.kernel()
    return match_fields(
        prepare_curves(c1, g, cfg, kern).smoothed,
        prepare_curves(c2, g, cfg, kern).smoothed,
    )


def distance_from_prepared(a: PreparedShape, b: PreparedShape) -> DistanceResult:
    e11 = match_fields(a.smoothed, a.smoothed).score
    e22 = match_fields(b.smoothed, b.smoothed).score
    e12 = match_fields(a.smoothed, b.smoothed).score
    return DistanceResult(e11 + e22 - 2.0 * e12, e11, e22, e12)


def distance(p1: Polygon, p2: Polygon, cfg: MatchConfig | None = None) -> DistanceResult:
    """``E(p1,p1) + E(p2,p2) - 2 E(p1,p2)`` on one common grid.

    The value can be negative; it is reported as computed.
    """
    cfg = cfg or MatchConfig()
    g = build_grid_spec(p1, p2, margin=cfg.margin)
    kern = cfg.kernel()
    return distance_from_prepared(
        prepare_polygon(p1, g, cfg, kern), prepare_polygon(p2, g, cfg, kern)
    )


def self_score(p: Polygon, cfg: MatchConfig | None = None) -> float:
    cfg = cfg or MatchConfig()
    g = build_grid_spec(p, margin=cfg.margin)
    s = prepare_polygon(p, g, cfg).smoothed
    return match_fields(s, s).score
