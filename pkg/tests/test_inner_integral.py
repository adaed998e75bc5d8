import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sint

from lunepv.inner_integral import (
    InnerDomainError,
    compare_inner,
    i_jordan,
    inner_numeric,
    j_moon_slab,
    j_weighted,
)
from lunepv.mc_oracle import mc_estimate_inner
from lunepv.quadrature import QuadConfig

TIGHT = QuadConfig(1e-11, 1e-11)


def quadpack_inner(x, y, c):
    """Reference I(x, y; c) from QUADPACK: exact y' integral, Cauchy weight at x' = 0."""

    def chord(xp):
        h = math.sqrt(max(0.0, 1.0 - (xp - c) ** 2))
        d = x - xp
        return math.atan2(y + h, d) - math.atan2(y - h, d) if d > 0 else (
            -(math.atan2(y + h, -d) - math.atan2(y - h, -d)))

    lo, hi = c - 1.0, c + 1.0
    cuts = sorted({lo, hi} | ({x} if lo < x < hi else set()))
    total = 0.0
    for p, q in zip(cuts[:-1], cuts[1:]):
        if p < 0 < q:
            total += sint.quad(chord, p, q, weight="cauchy", wvar=0.0, epsabs=1e-12, epsrel=1e-12, limit=400)[0]
        else:
            total += sint.quad(lambda t: chord(t) / t, p, q, epsabs=1e-12, epsrel=1e-12, limit=400)[0]
    return total


@pytest.mark.parametrize(
    "x, y, c",
    [(2.0, 0.0, 0.5), (1.2, 0.3, -0.5), (0.7, 0.1, 0.5), (-0.4, 0.8, 0.3), (1.0, -0.2, 0.8), (3.0, 1.5, -0.3)],
)
def test_inner_matches_quadpack(x, y, c):
    r = inner_numeric(x, y, c, TIGHT)
    assert r.converged
    assert r.value == pytest.approx(quadpack_inner(x, y, c), abs=1e-8)


def test_inner_anchor_values():
    r = inner_numeric(2.0, 0.0, 0.5)
    assert r.value == pytest.approx(2.3474432754463, abs=1e-9)
    r = inner_numeric(1.2, 0.3, -0.5)
    assert r.value == pytest.approx(-0.92493547141395, abs=1e-9)


def test_inner_negative_side_against_mc():
    r = inner_numeric(1.2, 0.3, -0.5)
    m = mc_estimate_inner(1.2, 0.3, -0.5, 2_000_000, seed=2024)
    assert abs(r.value - m.mean) < 4 * m.std_err


def test_y_evenness_example():
    a = inner_numeric(2.0, 0.3, 0.4)
    b = inner_numeric(2.0, -0.3, 0.4)
    assert abs(a.value - b.value) <= a.abs_err + b.abs_err + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-2.5, 2.5), st.floats(-1.5, 1.5), st.floats(-0.95, 0.95))
def test_y_evenness(x, y, c):
    if abs(math.hypot(x - c, y) - 1) < 1e-3 or abs(x) < 1e-3:
        return
    a = inner_numeric(x, y, c)
    b = inner_numeric(x, -y, c)
    assert abs(a.value - b.value) <= 10 * (a.abs_err + b.abs_err) + 1e-10


def test_center_far_from_pole_needs_no_pv():
    # |c| > 1: the disk misses x' = 0 and the integrand is bounded
    r = inner_numeric(0.5, 0.2, 2.0, TIGHT)
    assert r.value == pytest.approx(quadpack_inner(0.5, 0.2, 2.0), abs=1e-9)


def test_x_zero_on_chord_rejected():
    with pytest.raises(InnerDomainError):
        inner_numeric(0.0, 0.1, 0.3)


def test_x_zero_off_chord_allowed():
    r = inner_numeric(0.0, 1.5, 0.3)
    assert math.isfinite(r.value)


class TestJordan:
    def test_anchor(self):
        assert i_jordan(2.0, 0.0, 0.5) == pytest.approx(0.5 * math.pi * math.log(5776), rel=1e-15)
        assert i_jordan(2.0, 0.0, 0.5) == pytest.approx(13.605400, abs=1e-6)

    @given(st.floats(0.05, 3), st.floats(-2, 2), st.floats(-0.99, 0.99))
    def test_parities(self, x, y, a):
        v = i_jordan(x, y, a)
        assert i_jordan(x, y, -a) == v
        assert i_jordan(x, -y, a) == v

    def test_x_zero(self):
        with pytest.raises(InnerDomainError, match="x != 0"):
            i_jordan(0.0, 0.9, 0.5)

    def test_log_singularity(self):
        # (x + iy)^2 = a^2 - 1 at x = 0 only, so P vanishes only with x
        with pytest.raises(InnerDomainError):
            i_jordan(1e-200, 0.0, 0.5)


def test_compare_fields_identity():
    c = compare_inner(1.5, 0.2, 0.3)
    assert c.i_num_plus - c.i_num_minus == pytest.approx(c.disc_plus - c.disc_minus, abs=1e-12)
    assert c.err_bound >= 0
    with pytest.raises(InnerDomainError):
        compare_inner(1.5, 0.2, -0.3)


def test_j_zero_and_antisymmetry():
    assert j_weighted(1.3, 0.4, 0.0).value == 0.0
    p, m = j_weighted(1.3, 0.4, 0.6), j_weighted(1.3, 0.4, -0.6)
    assert p.value == pytest.approx(-m.value, abs=p.abs_err + m.abs_err + 1e-12)


def test_j_paths_agree_example():
    d = j_weighted(1.0, 0.2, 0.5)
    s = j_moon_slab(1.0, 0.2, 0.5)
    assert abs(d.value - s.value) <= 10 * (d.abs_err + s.abs_err) + 1e-9


def test_j_paths_agree_random():
    rng = np.random.default_rng(5)
    done = 0
    while done < 20:
        a = rng.uniform(0.1, 0.9)
        x, y = rng.uniform(-2, 2), rng.uniform(-1.3, 1.3)
        if abs(x) < 0.05 or min(abs(math.hypot(x - a, y) - 1), abs(math.hypot(x + a, y) - 1)) < 0.01:
            continue
        d = j_weighted(x, y, a)
        s = j_moon_slab(x, y, a)
        assert abs(d.value - s.value) <= 10 * (d.abs_err + s.abs_err) + 1e-8, (x, y, a)
        done += 1
