from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from edgecurrent.raster import Polygon

DATA = Path(__file__).parent / "data"

APPENDIX_P1 = [
    (30, 10), (50, 10), (50, 25), (40, 35), (28.1, 35), (28.1, 55),
    (27.9, 55), (27.9, 35), (10, 35), (10, 20), (30, 20), (30, 10),
]
APPENDIX_P2 = [
    (12, 10), (29, 10), (29, 20), (50, 20), (50, 25), (40, 35),
    (25.1, 35), (25.1, 50), (24.9, 50), (24.9, 35), (7, 35), (12, 20),
]


def random_star_polygon(rng: np.random.Generator, lo=1.0, hi=40.0, nmin=4, nmax=12):
    """Star-shaped simple polygon with radii kept inside [lo, hi]^2.

    Jittered, evenly spaced angles keep every angular gap below pi, which
    is what makes the radial ordering simple.
    """
    n = int(rng.integers(nmin, nmax + 1))
    c = rng.uniform(lo + 6, hi - 6, size=2)
    rmax = min(c[0] - lo, hi - c[0], c[1] - lo, hi - c[1])
    ang = (np.arange(n) + rng.uniform(0, 0.8, size=n)) * (2 * np.pi / n)
    rad = rng.uniform(0.3 * rmax, rmax, size=n)
    return np.column_stack([c[0] + rad * np.cos(ang), c[1] + rad * np.sin(ang)])


def random_rectangle(rng: np.random.Generator, lo=2, hi=30):
    a, c = (int(v) for v in rng.integers(lo, hi, size=2))
    b = a + int(rng.integers(1, 12))
    d = c + int(rng.integers(1, 12))
    return a, b, c, d


@pytest.fixture
def appendix_pair():
    return Polygon.from_vertices(APPENDIX_P1), Polygon.from_vertices(APPENDIX_P2)


@pytest.fixture(scope="session")
def appendix_expected():
    return json.loads((DATA / "appendix_expected.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
