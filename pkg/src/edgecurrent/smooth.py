"""Truncated Gaussian kernel and full 2-D convolution of the edge fields."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .decompose import EdgeField, VarifoldField

DEFAULT_SIZE = 5
DEFAULT_SIGMA = 1.0
DEFAULT_PEAK_DIVISOR = 0.1621


@dataclass(frozen=True, eq=False)
class Kernel:
    """Separable kernel ``weights = outer(factor, factor)``.

    ``factor`` is the unit-sum 1-D Gaussian scaled by ``1/sqrt(peak_divisor)``
    so the 2-D weights are exactly symmetric and the separable convolution
    reproduces them bit for bit on an impulse.
    """

    size: int
    sigma: float
    peak_divisor: float
    factor: np.ndarray
    weights: np.ndarray

    @property
    def radius(self) -> int:
        return (self.size - 1) // 2

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def gaussian_kernel(
    size: int = DEFAULT_SIZE,
    sigma: float = DEFAULT_SIGMA,
    peak_divisor: float | None = DEFAULT_PEAK_DIVISOR,
) -> Kernel:
    """Unit-sum ``size`` x ``size`` Gaussian divided by ``peak_divisor``.

    ``peak_divisor=None`` divides by the exact centre weight instead, giving
    a centre weight of 1.
    """
    if not isinstance(size, (int, np.integer)) or size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be a positive odd integer, got {size!r}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    r = (size - 1) // 2
    u = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(u * u) / (2.0 * sigma * sigma))
    g /= g.sum()
    if peak_divisor is None:
        peak_divisor = float(g[r] * g[r])
    elif not peak_divisor > 0:
        raise ValueError(f"peak_divisor must be positive, got {peak_divisor!r}")
    factor = g / np.sqrt(peak_divisor)
    weights = np.outer(factor, factor)
    factor.setflags(write=False)
    weights.setflags(write=False)
    return Kernel(int(size), float(sigma), float(peak_divisor), factor, weights)


def _full_1d(a: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    n = a.shape[axis]
    k = len(taps)
    shape = list(a.shape)
    shape[axis] = n + k - 1
    out = np.zeros(shape)
    for u in range(k):
        sl = [slice(None)] * a.ndim
        sl[axis] = slice(u, u + n)
        out[tuple(sl)] += taps[u] * a
    return out


def convolve_full(field: np.ndarray, kern: Kernel) -> np.ndarray:
    """Zero-padded full convolution, output (I+k-1) x (J+k-1).

    Two separable passes, axis 0 then axis 1. Taps are accumulated in a
    fixed order, so results do not depend on scheduling.
    """
    field = np.asarray(field, dtype=np.float64)
    return _full_1d(_full_1d(field, kern.factor, 0), kern.factor, 1)


def convolve_direct(field: np.ndarray, kern: Kernel) -> np.ndarray:
    """Non-separable reference: one shifted accumulation per 2-D tap."""
    field = np.asarray(field, dtype=np.float64)
    I, J = field.shape
    k = kern.size
    out = np.zeros((I + k - 1, J + k - 1))
    for u in range(k):
        for v in range(k):
            out[u : u + I, v : v + J] += kern.weights[u, v] * field
    return out


@dataclass(frozen=True, eq=False)
class SmoothedField:
    """Convolved components keyed by field name (T/B/L/R or H/V)."""

    components: dict[str, np.ndarray]

    @property
    def kind(self) -> str:
        return "unoriented" if set(self.components) == {"H", "V"} else "oriented"

    @property
    def dims(self) -> tuple[int, int]:
        return next(iter(self.components.values())).shape

    def __getitem__(self, name: str) -> np.ndarray:
        return self.components[name]


def smooth_edge_field(
    e: EdgeField | VarifoldField, kern: Kernel, workers: int | None = None
) -> SmoothedField:
    """Convolve every component independently; ``workers`` > 1 uses threads."""
    comps = e.components()
    names = list(comps)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            arrays = list(pool.map(lambda a: convolve_full(a, kern), comps.values()))
    else:
        arrays = [convolve_full(a, kern) for a in comps.values()]
    for a in arrays:
        a.setflags(write=False)
    return SmoothedField(dict(zip(names, arrays)))
