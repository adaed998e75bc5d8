"""Inner double integral over (x', y') and Jordan's closed form.

For an outer point (x, y) and a unit disk centred at (c, 0)::

    I(x, y; c) = PV int dx'/x' int dy' (x - x') / ((x - x')^2 + (y + y')^2)

The y' integral is done exactly (arctan difference over the chord), leaving a
one-dimensional x' integral with a simple pole at x' = 0, a jump of 2*pi at
x' = x when (x, -y) sits inside the chord, and square-root chord endpoints.
Away from the pole it is integrated in the angle variable x' = c + sin(theta),
which makes the chord half-height cos(theta) smooth; a symmetric window around
x' = 0 is handled by singularity subtraction.

The moon-weighted integral J(x, y; a) follows from the disk-difference
identity J = I(.; +a) - I(.; -a).  :func:`j_moon_slab` evaluates J directly
over the moons with the raw kernel as an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import slab_bounds
from .quadrature import (
    QuadConfig,
    QuadResult,
    integrate_batch,
    pv_cauchy_batch,
)

HALF_PI = 0.5 * math.pi


class InnerDomainError(ValueError):
    pass


@dataclass(frozen=True)
class InnerComparison:
    i_num_plus: float
    i_num_minus: float
    i_jordan: float
    disc_plus: float
    disc_minus: float
    err_bound: float


def _chord_kernel(xp, h, x, y, side):
    """arctan form of the y' integral over the chord ``(-h, h)`` at ``xp``.

    ``side`` (+1 left of x, -1 right of x) picks the one-sided limit if an
    abscissa rounds onto ``xp == x``.
    """
    d = x - xp
    d = np.where(d == 0, side * 1e-300, d)
    return np.arctan((y + h) / d) - np.arctan((y - h) / d)


def _chord_abscissa(c, t):
    """c + sin(t) without cancellation near the chord ends (|c| = 1 puts x' = 0 there)."""
    upper = (c + 1.0) - 2.0 * np.sin(0.25 * math.pi - 0.5 * t) ** 2
    lower = (c - 1.0) + 2.0 * np.sin(0.25 * math.pi + 0.5 * t) ** 2
    return np.where(t > 0, upper, lower)


def _check_point(x, y, c):
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and math.isfinite(c)):
        raise InnerDomainError("non-finite input")
    if abs(c) < 1:
        h0 = math.sqrt(1.0 - c * c)
        bad = (x == 0) & (np.abs(y) < h0)
        if np.any(bad):
            raise InnerDomainError(
                "x = 0 with -y inside the chord at x' = 0: the PV pole at x' = 0 "
                "coincides with the kernel jump at x' = x"
            )


def inner_batch(x, y, c: float, abs_tol, rel_tol, max_depth: int = 70, min_interval: float = 1e-8):
    """Vectorised I(x[i], y[i]; c).  Returns ``(values, errs, evals, ok)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    n = x.size
    _check_point(x, y, c)
    abs_tol = np.broadcast_to(np.asarray(abs_tol, dtype=float), (n,))
    rel_tol = np.broadcast_to(np.asarray(rel_tol, dtype=float), (n,))

    pv_pts, pv_w = np.zeros(0, dtype=np.int64), np.zeros(0)
    if abs(c) < 1:
        room = 1.0 - abs(c)
        w = 0.5 * np.where(x == 0, room, np.minimum(room, np.abs(x)))
        pv_pts, pv_w = np.arange(n), w
        outer_ranges = [(np.full(n, c - 1.0), -w), (w, np.full(n, c + 1.0))]
    else:
        outer_ranges = [(np.full(n, c - 1.0), np.full(n, c + 1.0))]

    # theta segments, split at the kernel jump x' = x
    seg_lo, seg_hi, seg_pt, seg_side = [], [], [], []
    idx = np.arange(n)
    for a_lo, a_hi in outer_ranges:
        t_lo = np.arcsin(np.clip(a_lo - c, -1, 1))
        t_hi = np.arcsin(np.clip(a_hi - c, -1, 1))
        inside = (x > a_lo) & (x < a_hi)
        t_x = np.arcsin(np.clip(x - c, -1, 1))
        # left part (x' < x) and right part (x' > x)
        left_hi = np.where(inside, t_x, np.where(x >= a_hi, t_hi, t_lo))
        right_lo = np.where(inside, t_x, np.where(x >= a_hi, t_hi, t_lo))
        for lo_, hi_, side in ((t_lo, left_hi, 1.0), (right_lo, t_hi, -1.0)):
            keep = hi_ > lo_
            seg_lo.append(lo_[keep])
            seg_hi.append(hi_[keep])
            seg_pt.append(idx[keep])
            seg_side.append(np.full(int(keep.sum()), side))
    seg_lo = np.concatenate(seg_lo)
    seg_hi = np.concatenate(seg_hi)
    seg_pt = np.concatenate(seg_pt)
    seg_side = np.concatenate(seg_side)
    nseg = np.bincount(seg_pt, minlength=n) + (pv_pts.size > 0)

    def theta_integrand(t, k):
        p = seg_pt[k]
        xp = _chord_abscissa(c, t)
        h = np.cos(t)
        safe = np.where(xp == 0, 1.0, xp)
        # xp == 0 only at a chord end with h == 0, where the integrand is bounded
        return np.where(xp == 0, 0.0, _chord_kernel(xp, h, x[p], y[p], seg_side[k]) * h / safe)

    with np.errstate(divide="ignore", invalid="ignore"):
        v_t, e_t, ev_t, ok_t = integrate_batch(
            theta_integrand, seg_lo, seg_hi,
            abs_tol[seg_pt] / nseg[seg_pt], rel_tol[seg_pt], max_depth,
        )
        value = np.bincount(seg_pt, weights=v_t, minlength=n)
        err = np.bincount(seg_pt, weights=e_t, minlength=n)
        evals = np.bincount(seg_pt, weights=ev_t, minlength=n).astype(np.int64)
        ok = np.ones(n, dtype=bool)
        np.logical_and.at(ok, seg_pt, ok_t)

        if pv_pts.size:
            def window_kernel(t, k):
                h = np.sqrt(np.clip(1.0 - (t - c) ** 2, 0.0, None))
                side = np.where(t < x[k], 1.0, -1.0)
                return _chord_kernel(t, h, x[k], y[k], side)

            v_p, e_p, ev_p, ok_p = pv_cauchy_batch(
                window_kernel, -pv_w, pv_w, np.zeros(n),
                abs_tol / nseg, rel_tol, max_depth, min_interval,
            )
            value += v_p
            err += e_p
            evals += ev_p
            ok &= ok_p
    return value, err, evals, ok


def inner_numeric(x: float, y: float, center: float, cfg: QuadConfig = QuadConfig()) -> QuadResult:
    """I(x, y) over the unit disk centred at (center, 0)."""
    v, e, ev, ok = inner_batch([x], [y], center, cfg.abs_tol, cfg.rel_tol, cfg.max_depth, cfg.min_interval)
    return QuadResult(float(v[0]), float(e[0]), int(ev[0]), bool(ok[0]))


def jordan_argument(x, y, a):
    """(2x)^4 |(x+iy)^2 + 1 - a^2|^2 in real arithmetic."""
    return (2.0 * x) ** 4 * ((x * x - y * y + 1.0 - a * a) ** 2 + (2.0 * x * y) ** 2)


def i_jordan(x: float, y: float, a: float) -> float:
    """Jordan's closed form (pi/2) log[(2x)^4 ((x+iy)^2+1-a^2)((x-iy)^2+1-a^2)]."""
    if x == 0:
        raise InnerDomainError("Jordan's form needs x != 0")
    p = jordan_argument(x, y, a)
    if not p > 0:
        raise InnerDomainError(f"log argument vanishes at (x, y, a) = ({x}, {y}, {a})")
    return 0.5 * math.pi * math.log(p)


def compare_inner(x: float, y: float, a: float, cfg: QuadConfig = QuadConfig()) -> InnerComparison:
    if not 0 < a < 1:
        raise InnerDomainError("compare_inner needs 0 < a < 1")
    jv = i_jordan(x, y, a)
    plus = inner_numeric(x, y, a, cfg)
    minus = inner_numeric(x, y, -a, cfg)
    return InnerComparison(
        i_num_plus=plus.value,
        i_num_minus=minus.value,
        i_jordan=jv,
        disc_plus=plus.value - jv,
        disc_minus=minus.value - jv,
        err_bound=plus.abs_err + minus.abs_err,
    )


def j_batch(x, y, a: float, abs_tol, rel_tol, max_depth: int = 70, min_interval: float = 1e-8):
    """Vectorised moon-weighted J(x, y; a) = I(+a) - I(-a).

    Returns ``(values, errs, evals, ok)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    if a == 0:
        z = np.zeros(x.size)
        return z, z.copy(), np.zeros(x.size, dtype=np.int64), np.ones(x.size, dtype=bool)
    # each disk gets half of the error budget
    abs_tol = np.asarray(abs_tol, dtype=float) / 2
    vp, ep, evp, okp = inner_batch(x, y, a, abs_tol, rel_tol, max_depth, min_interval)
    vm, em, evm, okm = inner_batch(x, y, -a, abs_tol, rel_tol, max_depth, min_interval)
    return vp - vm, ep + em, evp + evm, okp & okm


def j_weighted(x: float, y: float, a: float, cfg: QuadConfig = QuadConfig()) -> QuadResult:
    v, e, ev, ok = j_batch([x], [y], a, cfg.abs_tol, cfg.rel_tol, cfg.max_depth, cfg.min_interval)
    return QuadResult(float(v[0]), float(e[0]), int(ev[0]), bool(ok[0]))


def _raw_kernel(x, y, xp, yp):
    d = x - xp
    return d / (d * d + (y + yp) ** 2)


def j_moon_slab(x: float, y: float, a: float, cfg: QuadConfig = QuadConfig()) -> QuadResult:
    """J(x, y; a) integrated directly over the two moons with the raw kernel.

    y' outer, x' inner over moon slabs.  The slabs stay clear of x' = 0
    except at the touch points, where the x' integral only grows like a log,
    so no principal value is needed.  Shares no code with the disk path
    beyond the adaptive integrator and the slab bounds.
    """
    if a == 0:
        return QuadResult(0.0, 0.0, 0, True)
    if x == 0 or not (math.isfinite(x) and math.isfinite(y)):
        raise InnerDomainError("j_moon_slab needs finite x != 0")
    breaks = {-1.0, 0.0, 1.0}
    if abs(a) < 1:
        s = math.sqrt(1 - a * a)
        breaks |= {s, -s}
    if -1 < -y < 1:
        breaks.add(-y)
    b = np.array(sorted(breaks))
    y_lo, y_hi = b[:-1], b[1:]
    inner_abs = cfg.abs_tol / 10
    inner_rel = cfg.rel_tol / 10

    def slab_sum(yp, _idx):
        lo, hi = slab_bounds(yp, a)
        # right-moon slab (sign +1) and its mirror (sign -1), split at x' = x
        pieces = []
        for s_lo, s_hi, sign in ((lo, hi, 1.0), (-hi, -lo, -1.0)):
            cut = np.clip(x, s_lo, s_hi)
            pieces.append((s_lo, cut, sign))
            pieces.append((cut, s_hi, sign))
        node = np.arange(yp.size)
        i_lo = np.concatenate([p[0] for p in pieces])
        i_hi = np.concatenate([p[1] for p in pieces])
        i_node = np.tile(node, len(pieces))
        i_sign = np.concatenate([np.full(yp.size, p[2]) for p in pieces])

        def f(t, k):
            return _raw_kernel(x, y, t, yp[i_node[k]]) / t

        with np.errstate(divide="ignore", invalid="ignore"):
            v, e, _, ok = integrate_batch(f, i_lo, i_hi, inner_abs, inner_rel, cfg.max_depth)
        val = np.bincount(i_node, weights=i_sign * v, minlength=yp.size)
        err = np.bincount(i_node, weights=e, minlength=yp.size)
        good = np.ones(yp.size, dtype=bool)
        np.logical_and.at(good, i_node, ok)
        return val, err, good

    v, e, ev, ok = integrate_batch(
        slab_sum, y_lo, y_hi, cfg.abs_tol / len(y_lo), cfg.rel_tol, cfg.max_depth
    )
    return QuadResult(float(v.sum()), float(e.sum()), int(ev.sum()), bool(ok.all()))
