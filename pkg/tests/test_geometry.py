import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lunepv.geometry import (
    GeometryError,
    Point,
    RegionClass,
    Side,
    classify_point,
    delta,
    moon_area,
    moon_slab,
    touch_points,
)

coord = st.floats(min_value=-3, max_value=3, allow_nan=False)
param = st.floats(min_value=-2.5, max_value=2.5, allow_nan=False)


def off_circles(x, y, a, margin=1e-9):
    return (abs(math.hypot(x - a, y) - 1) > margin) and (abs(math.hypot(x + a, y) - 1) > margin)


@pytest.mark.parametrize(
    "p, a, expected",
    [
        ((1.0, 0.0), 0.3, RegionClass.RIGHT_MOON),
        ((0.0, 0.0), 0.3, RegionClass.LENS),
        ((5.0, 5.0), 0.3, RegionClass.EXTERIOR),
        ((-1.0, 0.0), 0.3, RegionClass.LEFT_MOON),
        ((1.3, 0.0), 0.3, RegionClass.BOUNDARY),
    ],
)
def test_classify_point_examples(p, a, expected):
    assert classify_point(Point(*p), a, 0.0) is expected


def test_boundary_band_is_checked_first():
    assert classify_point(Point(1.3 + 1e-13, 0.0), 0.3) is RegionClass.BOUNDARY
    assert classify_point(Point(1.3 + 1e-13, 0.0), 0.3, boundary_tol=0.0) is RegionClass.EXTERIOR


@pytest.mark.parametrize(
    "p, a, expected",
    [((-1.0, 0.0), 0.3, -1), ((0.0, 0.5), 0.3, 0), ((1.0, 0.0), -0.3, -1), ((1.0, 0.0), 0.3, 1)],
)
def test_delta_examples(p, a, expected):
    assert delta(Point(*p), a) == expected


def test_signed_center_convention():
    # for a < 0 the "right" moon belongs to the circle centred at (a, 0), on the left
    assert classify_point(Point(-1.0, 0.0), -0.3) is RegionClass.RIGHT_MOON
    assert delta(Point(-1.0, 0.0), -0.3) == 1


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(GeometryError):
        classify_point(Point(bad, 0.0), 0.3)
    with pytest.raises(GeometryError):
        delta(Point(0.0, 0.0), bad)


@given(coord, coord, param)
def test_delta_parities(x, y, a):
    assume(off_circles(x, y, a))
    d = delta(Point(x, y), a)
    assert delta(Point(-x, y), a) == -d
    assert delta(Point(x, -y), a) == d
    assert delta(Point(x, y), -a) == -d


@given(coord, coord, param)
def test_disk_difference_identity(x, y, a):
    assume(off_circles(x, y, a))
    inside_plus = int(math.hypot(x - a, y) < 1)
    inside_minus = int(math.hypot(x + a, y) < 1)
    assert delta(Point(x, y), a) == inside_plus - inside_minus


def test_delta_vectorised_matches_scalar():
    rng = np.random.default_rng(3)
    x, y = rng.uniform(-2, 2, 500), rng.uniform(-1.2, 1.2, 500)
    vec = delta(Point(x, y), 0.4)
    assert list(vec) == [delta(Point(u, v), 0.4) for u, v in zip(x, y)]


@pytest.mark.parametrize(
    "a, expected",
    [(0.6, (0.8, -0.8)), (1.0, None), (0.0, (1.0, -1.0)), (1.5, None)],
)
def test_touch_points(a, expected):
    got = touch_points(a)
    if expected is None:
        assert got is None
    else:
        assert got == pytest.approx(expected, abs=1e-15)


def test_moon_slab_examples():
    (lo, hi), = moon_slab(0.0, 0.5, Side.RIGHT)
    assert (lo, hi) == pytest.approx((0.5, 1.5))
    h = math.sqrt(1 - 0.81)
    (lo, hi), = moon_slab(0.9, 0.5, Side.RIGHT)
    assert (lo, hi) == pytest.approx((0.5 - h, 0.5 + h), abs=1e-15)
    assert (lo, hi) == pytest.approx((0.064110, 0.935890), abs=1e-6)
    assert moon_slab(1.2, 0.5, Side.RIGHT) == ()


def test_moon_slab_left_is_mirror():
    (lo, hi), = moon_slab(0.3, 0.5, Side.LEFT)
    (rlo, rhi), = moon_slab(0.3, 0.5, Side.RIGHT)
    assert (lo, hi) == (-rhi, -rlo)


def test_degenerate_slabs():
    # coincident circles: no moons; separated circles: full chord
    assert moon_slab(0.2, 0.0) == ()
    h = math.sqrt(1 - 0.04)
    for a in (1.5, 1.0):
        (lo, hi), = moon_slab(0.2, a)
        assert (lo, hi) == pytest.approx((a - h, a + h))


@given(
    st.floats(min_value=-0.999, max_value=0.999),
    st.floats(min_value=-2.2, max_value=2.2).filter(lambda v: abs(v) > 1e-3),
    st.sampled_from([Side.RIGHT, Side.LEFT]),
)
def test_slab_consistency(y, a, side):
    want = RegionClass.RIGHT_MOON if side is Side.RIGHT else RegionClass.LEFT_MOON
    for lo, hi in moon_slab(y, a, side):
        assert lo < hi
        assume(hi - lo > 1e-6)
        assert classify_point(Point(0.5 * (lo + hi), y), a) is want
        step = 1e-7
        assert classify_point(Point(lo - step, y), a, 0.0) is not want
        assert classify_point(Point(hi + step, y), a, 0.0) is not want


@pytest.mark.parametrize("a, expected", [(0.0, 0.0), (1.0, math.pi), (2.0, math.pi)])
def test_moon_area_limits(a, expected):
    assert moon_area(a) == pytest.approx(expected, abs=1e-15)


def test_moon_area_half():
    expected = math.pi - (2 * math.acos(0.5) - math.sqrt(0.75))
    assert moon_area(0.5) == pytest.approx(expected, rel=1e-15)
    assert moon_area(0.5) == pytest.approx(1.913223, abs=1e-6)
    assert moon_area(-0.5) == moon_area(0.5)


def test_moon_area_against_point_count():
    rng = np.random.default_rng(11)
    n = 2_000_000
    x = rng.uniform(-1.5, 1.5, n)
    y = rng.uniform(-1.0, 1.0, n)
    hits = delta(Point(x, y), 0.5) == 1
    p = hits.mean()
    est, se = 6.0 * p, 6.0 * math.sqrt(p * (1 - p) / n)
    assert abs(est - moon_area(0.5)) < 4 * se
