"""Polygon and curve edge matching via four directional boundary currents."""

from .decompose import (
    EdgeField,
    OrientedCurveSet,
    VarifoldField,
    difference_fields,
    rasterize_oriented_curves,
    to_varifold,
)
from .match import (
    DistanceResult,
    MatchConfig,
    MatchResult,
    curve_match,
    distance,
    edge_match,
    match_fields,
    self_score,
    varifold_match,
)
from .raster import BitGrid, GeometryError, GridSpec, Polygon, build_grid_spec, rasterize
from .smooth import Kernel, SmoothedField, convolve_full, gaussian_kernel, smooth_edge_field

__version__ = "0.1.0"
