"""Two unit circles centred at (+a, 0) and (-a, 0), their moons and lens.

The sign function is +1 in the moon of the circle centred at (a, 0), -1 in
the moon of the circle centred at (-a, 0) and 0 elsewhere.  The labels follow
the signed centre, so for a < 0 the "right" moon lies on the left of the
plane.  All functions broadcast over numpy arrays.
"""
from __future__ import annotations

import enum
import math
from typing import NamedTuple, Optional

import numpy as np

BOUNDARY_TOL = 1e-12


class GeometryError(ValueError):
    pass


class Point(NamedTuple):
    x: float
    y: float


class RegionClass(enum.Enum):
    RIGHT_MOON = "RightMoon"
    LEFT_MOON = "LeftMoon"
    LENS = "Lens"
    EXTERIOR = "Exterior"
    BOUNDARY = "Boundary"


class Side(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


Slab = tuple  # tuple of (lo, hi) pairs, sorted and disjoint


def _finite(*vals):
    for v in vals:
        if not np.all(np.isfinite(v)):
            raise GeometryError(f"non-finite input: {v!r}")


def _circle_dist(x, y, a):
    """Signed distances to the circles at +a and -a (negative inside)."""
    return np.hypot(x - a, y) - 1.0, np.hypot(x + a, y) - 1.0


def classify_point(p: Point, a: float, boundary_tol: float = BOUNDARY_TOL) -> RegionClass:
    x, y = p
    _finite(x, y, a)
    if boundary_tol < 0:
        raise GeometryError("boundary_tol must be >= 0")
    d_plus, d_minus = _circle_dist(x, y, a)
    if abs(d_plus) <= boundary_tol or abs(d_minus) <= boundary_tol:
        return RegionClass.BOUNDARY
    inside_plus, inside_minus = d_plus < 0, d_minus < 0
    if inside_plus and inside_minus:
        return RegionClass.LENS
    if inside_plus:
        return RegionClass.RIGHT_MOON
    if inside_minus:
        return RegionClass.LEFT_MOON
    return RegionClass.EXTERIOR


def delta(p: Point, a: float):
    """Moon sign function; ``p`` may hold arrays.

    Equals ``inside(+a) - inside(-a)`` away from the circles; points within
    ``BOUNDARY_TOL`` of either circle map to 0.
    """
    x, y = p
    _finite(x, y, a)
    d_plus, d_minus = _circle_dist(np.asarray(x, float), np.asarray(y, float), a)
    out = (d_plus < 0).astype(int) - (d_minus < 0).astype(int)
    on_edge = (np.abs(d_plus) <= BOUNDARY_TOL) | (np.abs(d_minus) <= BOUNDARY_TOL)
    out = np.where(on_edge, 0, out)
    return int(out) if out.ndim == 0 else out


def touch_points(a: float) -> Optional[tuple[float, float]]:
    """Heights where the two moons meet on the y axis, or None for |a| >= 1."""
    _finite(a)
    if abs(a) >= 1:
        return None
    s = math.sqrt(1.0 - a * a)
    return (s, -s)


def slab_bounds(y, a: float):
    """Vectorised x-limits ``(lo, hi)`` of the moon of the circle at +a.

    At height y the chord of that circle minus the chord of its mirror is a
    single interval: ``(|a - h|, a + h)`` for a > 0 and ``(a - h, -|a + h|)``
    for a < 0, with ``h = sqrt(1 - y^2)``.  Empty slabs come back with
    ``lo >= hi``.
    """
    y = np.asarray(y, dtype=float)
    h = np.sqrt(np.clip(1.0 - y * y, 0.0, None))
    if a > 0:
        lo, hi = np.abs(a - h), a + h
    elif a < 0:
        lo, hi = a - h, -np.abs(a + h)
    else:
        lo, hi = np.zeros_like(h), np.zeros_like(h)
    empty = (np.abs(y) >= 1) | (lo >= hi)
    return np.where(empty, 0.0, lo), np.where(empty, 0.0, hi)


def moon_slab(y: float, a: float, side: Side = Side.RIGHT) -> Slab:
    """Open x-intervals where delta is +1 (RIGHT) or -1 (LEFT) at height ``y``."""
    _finite(y, a)
    lo, hi = slab_bounds(y, a)
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        return ()
    if Side(side) is Side.LEFT:
        lo, hi = -hi, -lo
    return ((lo, hi),)


def lens_area(a: float) -> float:
    a = abs(a)
    if a >= 1:
        return 0.0
    return 2.0 * math.acos(a) - 2.0 * a * math.sqrt(1.0 - a * a)


def moon_area(a: float) -> float:
    _finite(a)
    return math.pi - lens_area(a)
