"""Adaptive Gauss-Kronrod quadrature, Cauchy principal values and the y' kernel.

The workhorse is :func:`integrate_batch`, a breadth-first adaptive 7/15-point
Gauss-Kronrod integrator that advances many independent integrals at once.
Each refinement sweep evaluates the integrand on every active panel of every
integral in a single vectorised call, so nested integrals (outer nodes that
each need an inner integral) cost a handful of numpy calls per sweep instead
of one Python call per node.

Integrands receive ``(t, idx)``: the abscissae and, for each abscissa, the
index of the integral it belongs to.  They return either an array of values or
a ``(values, errors, ok)`` triple when the values themselves come from an
inner quadrature; those errors are propagated into the reported error and a
false ``ok`` marks the outer integral as unconverged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "QuadConfig",
    "QuadResult",
    "Interval",
    "QuadratureError",
    "integrate_adaptive",
    "integrate_batch",
    "pv_cauchy",
    "pv_cauchy_batch",
    "kernel_y_integral",
]

# QUADPACK qk15 abscissae (non-negative half) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-node rule on [-1, 1], ascending
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps


class QuadratureError(ValueError):
    """Raised for invalid quadrature input or a non-finite integrand value."""


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_depth: int = 70
    # PV near-pole guard distance
    min_interval: float = 1e-8

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.min_interval > 0):
            raise ValueError(f"tolerances must be positive: {self}")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    def tightened(self, factor: float) -> "QuadConfig":
        """Same config with both tolerances divided by ``factor``."""
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)

    @classmethod
    def from_tol(cls, tol: float, **kw) -> "QuadConfig":
        return cls(abs_tol=tol, rel_tol=tol, **kw)


class Interval(NamedTuple):
    lo: float
    hi: float


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_err: float
    evals: int
    converged: bool


def _call(f, t, idx):
    out = f(t, idx)
    if isinstance(out, tuple):
        vals, errs, ok = out
        vals = np.asarray(vals, dtype=float)
        errs = np.abs(np.asarray(errs, dtype=float))
        ok = np.asarray(ok, dtype=bool)
    else:
        vals = np.asarray(out, dtype=float)
        errs = None
        ok = None
    if vals.shape != t.shape:
        vals = np.broadcast_to(vals, t.shape).astype(float)
    bad = ~np.isfinite(vals)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise QuadratureError(f"integrand returned {vals[k]} at x={t[k]!r}")
    return vals, errs, ok


def integrate_batch(
    f: Callable,
    lo,
    hi,
    abs_tol,
    rel_tol,
    max_depth: int = 70,
    max_panels: int = 2048,
):
    """Integrate ``n`` independent integrals over ``[lo[i], hi[i]]`` adaptively.

    ``abs_tol``/``rel_tol`` may be scalars or per-integral arrays.  Panels are
    bisected while their error exceeds their length-proportional share of
    ``max(abs_tol, rel_tol*|I|)``; panels at ``max_depth`` are accepted as-is
    and leave the integral flagged unconverged, as does an integral asking to
    split more than ``max_panels`` panels in one sweep (round-off noise would
    otherwise double the work forever).

    Returns ``(values, abs_errs, evals, converged)`` arrays of length ``n``.
    Reported errors include any error propagated from the integrand.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = lo.size
    abs_tol = np.broadcast_to(np.asarray(abs_tol, dtype=float), (n,))
    rel_tol = np.broadcast_to(np.asarray(rel_tol, dtype=float), (n,))
    if n == 0:
        z = np.zeros(0)
        return z, z.copy(), np.zeros(0, dtype=np.int64), np.zeros(0, dtype=bool)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise QuadratureError("integration limits must be finite")

    length = hi - lo
    acc_val = np.zeros(n)
    acc_err = np.zeros(n)
    acc_inner = np.zeros(n)
    evals = np.zeros(n, dtype=np.int64)
    inner_ok = np.ones(n, dtype=bool)

    # empty intervals integrate to zero without evaluation
    live = length != 0
    p_lo, p_hi = lo[live], hi[live]
    p_id = np.flatnonzero(live)
    p_depth = np.zeros(p_id.size, dtype=np.int64)

    while p_id.size:
        mid = 0.5 * (p_lo + p_hi)
        half = 0.5 * (p_hi - p_lo)
        t = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
        tid = np.repeat(p_id, 15)
        vals, errs, ok = _call(f, t, tid)
        fv = vals.reshape(-1, 15)
        kron = half * (fv @ KRONROD_WEIGHTS)
        gauss = half * (fv @ GAUSS_WEIGHTS)
        mean = kron / np.where(half != 0, 2 * half, 1.0)
        resasc = np.abs(half) * (np.abs(fv - mean[:, None]) @ KRONROD_WEIGHTS)
        resabs = np.abs(half) * (np.abs(fv) @ KRONROD_WEIGHTS)
        err = np.abs(kron - gauss)
        with np.errstate(invalid="ignore", divide="ignore"):
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
        err = np.where(resasc > 0, scaled, err)
        floor = 50 * _EPS * resabs
        at_floor = err <= floor
        err = np.maximum(err, floor)
        if errs is not None:
            inner = np.abs(half) * (errs.reshape(-1, 15) @ KRONROD_WEIGHTS)
            np.add.at(acc_inner, p_id, inner)
            np.logical_and.at(inner_ok, tid, ok)
        np.add.at(evals, p_id, 15)

        tot_val = acc_val + np.bincount(p_id, weights=kron, minlength=n)
        tot_err = acc_err + np.bincount(p_id, weights=err, minlength=n)
        tol = np.maximum(abs_tol, rel_tol * np.abs(tot_val))
        done = tot_err <= tol
        share = tol[p_id] * np.abs(p_hi - p_lo) / np.abs(length[p_id])
        want = (~done[p_id]) & (err > share) & ~at_floor
        # an integral with too many live panels stops refining altogether
        crowded = np.bincount(p_id[want], minlength=n) > max_panels
        want &= ~crowded[p_id]
        # stop at max_depth or before child nodes would collide with endpoints
        tiny = np.abs(half) <= 2e3 * _EPS * np.abs(mid)
        split = want & (p_depth < max_depth) & ~tiny
        keep = ~split
        np.add.at(acc_val, p_id[keep], kron[keep])
        np.add.at(acc_err, p_id[keep], err[keep])

        s_lo, s_hi, s_mid = p_lo[split], p_hi[split], mid[split]
        s_id, s_d = p_id[split], p_depth[split] + 1
        # children interleaved so each integral's panels stay in x order
        p_lo = np.column_stack([s_lo, s_mid]).ravel()
        p_hi = np.column_stack([s_mid, s_hi]).ravel()
        p_id = np.repeat(s_id, 2)
        p_depth = np.repeat(s_d, 2)

    tol = np.maximum(abs_tol, rel_tol * np.abs(acc_val))
    converged = (acc_err <= tol) & inner_ok
    return acc_val, acc_err + acc_inner, evals, converged


def _check_interval(iv) -> Interval:
    lo, hi = float(iv[0]), float(iv[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise QuadratureError(f"interval must be finite, got ({lo}, {hi})")
    if not lo < hi:
        raise QuadratureError(f"interval needs lo < hi, got ({lo}, {hi})")
    return Interval(lo, hi)


def integrate_adaptive(f: Callable, iv, cfg: QuadConfig = QuadConfig()) -> QuadResult:
    """Adaptive 7/15 Gauss-Kronrod integral of ``f`` over ``iv``.

    ``f`` is called with an ndarray of abscissae and must return an array of
    the same shape.  Integrable endpoint singularities are fine since the
    rule never samples the endpoints.
    """
    lo, hi = _check_interval(iv)
    val, err, ev, ok = integrate_batch(
        lambda t, _idx: f(t), [lo], [hi], cfg.abs_tol, cfg.rel_tol, cfg.max_depth
    )
    return QuadResult(float(val[0]), float(err[0]), int(ev[0]), bool(ok[0]))


def _guard_scale(pole, lo, hi, min_interval):
    # near-pole guard and difference step never exceed a fraction of the
    # distance to the nearer endpoint
    room = np.minimum(pole - lo, hi - pole)
    guard = np.minimum(min_interval, 1e-6 * room)
    step = np.minimum(1e-5, 1e-2 * room)
    return guard, step


def pv_cauchy_batch(f: Callable, lo, hi, pole, abs_tol, rel_tol, max_depth=70, min_interval=1e-8):
    """Batched principal value ``PV int_lo^hi f(t, i)/(t - pole[i]) dt``.

    Singularity subtraction: the smooth remainder ``(f(t) - f(p))/(t - p)`` is
    integrated on both sides of the pole and ``f(p) ln|(hi-p)/(p-lo)|`` is
    added back.  Within the guard distance of the pole the remainder is
    replaced by a central-difference estimate of ``f'(p)``.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    pole = np.atleast_1d(np.asarray(pole, dtype=float))
    n = lo.size
    if not np.all((lo < pole) & (pole < hi)):
        raise QuadratureError("pole must lie strictly inside the interval")
    ids = np.arange(n)
    guard, step = _guard_scale(pole, lo, hi, min_interval)
    fp = np.asarray(f(pole, ids), dtype=float)
    dfp = (np.asarray(f(pole + step, ids), dtype=float)
           - np.asarray(f(pole - step, ids), dtype=float)) / (2 * step)

    def g(t, idx):
        k = idx % n
        d = t - pole[k]
        near = np.abs(d) < guard[k]
        safe = np.where(near, 1.0, d)
        return np.where(near, dfp[k], (f(t, k) - fp[k]) / safe)

    both_lo = np.concatenate([lo, pole])
    both_hi = np.concatenate([pole, hi])
    at = np.concatenate([np.broadcast_to(abs_tol, (n,)), np.broadcast_to(abs_tol, (n,))]) / 2
    rt = np.concatenate([np.broadcast_to(rel_tol, (n,)), np.broadcast_to(rel_tol, (n,))])
    val, err, ev, ok = integrate_batch(g, both_lo, both_hi, at, rt, max_depth)
    log_term = fp * np.log((hi - pole) / (pole - lo))
    value = val[:n] + val[n:] + log_term
    return value, err[:n] + err[n:], ev[:n] + ev[n:] + 3, ok[:n] & ok[n:]


def pv_cauchy(f: Callable, iv, pole: float, cfg: QuadConfig = QuadConfig()) -> QuadResult:
    """``PV int f(x)/(x - pole) dx`` over ``iv``; ``f`` must be smooth at the pole."""
    lo, hi = _check_interval(iv)
    if not lo < pole < hi:
        raise QuadratureError(
            f"pole {pole} not strictly inside ({lo}, {hi}); split the interval "
            "or use integrate_adaptive"
        )
    val, err, ev, ok = pv_cauchy_batch(
        lambda t, _idx: f(t), [lo], [hi], [pole],
        cfg.abs_tol, cfg.rel_tol, cfg.max_depth, cfg.min_interval,
    )
    return QuadResult(float(val[0]), float(err[0]), int(ev[0]), bool(ok[0]))


def kernel_y_integral(x, y, xp, yiv):
    """Exact ``int (x-xp)/((x-xp)^2 + (y+yp)^2) dyp`` over ``yiv``.

    Vectorised over ``x``, ``y``, ``xp`` and the interval ends.  At ``xp == x``
    the integrand is not defined; the one-sided limits are ``+-pi`` when
    ``-y`` lies inside ``yiv``.
    """
    lo, hi = yiv
    x, xp = np.asarray(x, dtype=float), np.asarray(xp, dtype=float)
    d = x - xp
    if np.any(d == 0):
        raise QuadratureError("kernel_y_integral undefined at xp == x; split the xp integral there")
    out = np.arctan((y + np.asarray(hi)) / d) - np.arctan((y + np.asarray(lo)) / d)
    return float(out) if out.ndim == 0 else out
