"""The quadruple integral F(a) and grid scans over a.

F(a) = int dy int dx delta(x, y) J(x, y; a) / x^2, integrated y-outer and
x-inner over moon slabs.  At fixed y a slab never contains x = 0, so the
1/x^2 factor is evaluated pointwise.  The slabs only reach x = 0 at the touch
points y = +-sqrt(1 - a^2) (y = 0 when |a| = 1).  Around each of them the
y range is cut into geometric shells |y - s| in (w/2^(k+1), w/2^k) down to a
final cutoff; the shell contributions ("increments") tell whether the
integral converges there.  Geometrically shrinking increments are summed and
extrapolated; increments that level off mean F_eps grows like
``log_rate * ln(1/eps)`` and the result is flagged unconverged, with the
partial sum at the cutoff as the bracketing estimate.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import slab_bounds
from .inner_integral import j_batch
from .quadrature import QuadConfig, integrate_adaptive, integrate_batch

DEFAULT_TOL = 1e-4
DEFAULT_CUTOFF = 1e-5
# shell-to-shell ratio below which increments count as geometrically decaying
CONVERGENT_RATIO = 0.75


def default_config(tol: float = DEFAULT_TOL) -> QuadConfig:
    return QuadConfig.from_tol(tol)


@dataclass(frozen=True)
class FResult:
    a: float
    value: float
    abs_err: float
    evals: int
    converged: bool
    touchpoint_window: float = 0.0
    increments: tuple = ()
    log_rate: float = math.nan
    finite_part: float = math.nan
    message: str = ""


@dataclass(frozen=True)
class ScanRow:
    a: float
    f: FResult
    refinement_delta: float
    error: str = ""


def touch_heights(a: float) -> Optional[float]:
    """Non-negative height where the moons meet, or None if they do not."""
    if abs(a) < 1:
        return math.sqrt(1.0 - a * a)
    if abs(a) == 1:
        return 0.0
    return None


def default_window(a: float) -> float:
    s = touch_heights(a)
    if s is None:
        return 0.0
    if s == 0:
        return 0.1
    return 0.5 * min(s, 1.0 - s, 0.1)


def _y_segments(a, window, cutoff):
    """Segments on y > 0 as (lo, hi, label); label -1 is the base region."""
    s = touch_heights(a)
    if s is None:
        return [(0.0, 1.0, -1)], 0, 0.0
    n_shells = max(1, math.ceil(math.log2(window / cutoff)))
    segs = []
    if s > 0:
        segs.append((0.0, s - window, -1))
    segs.append((s + window, 1.0, -1))
    for k in range(n_shells):
        outer, inner = window / 2 ** k, window / 2 ** (k + 1)
        if s > 0:
            segs.append((s - outer, s - inner, k))
        segs.append((s + inner, s + outer, k))
    return segs, n_shells, window / 2 ** n_shells


def _integrate_region(a, segs, cfg, right_only):
    """Sum of the y-integrals over ``segs``; returns per-segment arrays."""
    y_lo = np.array([s[0] for s in segs])
    y_hi = np.array([s[1] for s in segs])
    x_abs, x_rel = cfg.abs_tol / 10, cfg.rel_tol / 10
    j_abs, j_rel = cfg.abs_tol / 100, cfg.rel_tol / 100
    total_evals = [0]

    def slab_integrals(yn, _idx):
        lo, hi = slab_bounds(yn, a)
        pieces = [(lo, hi, 1.0)]
        if not right_only:
            pieces.append((-hi, -lo, -1.0))
        m = yn.size
        i_lo = np.concatenate([p[0] for p in pieces])
        i_hi = np.concatenate([p[1] for p in pieces])
        i_sign = np.concatenate([np.full(m, p[2]) for p in pieces])
        i_node = np.tile(np.arange(m), len(pieces))

        def integrand(t, k):
            yy = yn[i_node[k]]
            v, e, _, ok = j_batch(t, yy, a, j_abs * t * t, j_rel, cfg.max_depth, cfg.min_interval)
            t2 = t * t
            return i_sign[k] * v / t2, e / t2, ok

        v, e, ev, ok = integrate_batch(integrand, i_lo, i_hi, x_abs, x_rel, cfg.max_depth)
        total_evals[0] += int(ev.sum())
        val = np.bincount(i_node, weights=v, minlength=m)
        err = np.bincount(i_node, weights=e, minlength=m)
        good = np.ones(m, dtype=bool)
        np.logical_and.at(good, i_node, ok)
        return val, err, good

    v, e, _, ok = integrate_batch(
        slab_integrals, y_lo, y_hi, cfg.abs_tol / len(segs), cfg.rel_tol, cfg.max_depth
    )
    return v, e, ok, total_evals[0]


def _aitken_limit(seq):
    """Aitken delta-squared limit of the last three terms of ``seq``."""
    s0, s1, s2 = seq[-3:]
    d2 = (s2 - s1) - (s1 - s0)
    if d2 == 0:
        return float(s2)
    return float(s2 - (s2 - s1) ** 2 / d2)


def _analyse_shells(base, base_err, inc, inc_err, cutoff, tol, ok):
    """Combine the base region and shell increments.

    Returns ``(value, err, converged, log_rate, finite_part, message)``.  The
    per-halving increment limit is estimated by Aitken extrapolation; a
    nonzero limit means F_eps grows like ``limit/ln 2 * ln(1/eps)``.
    """
    partial = base + float(np.sum(inc))
    err = base_err + float(np.sum(inc_err))
    if inc.size < 3:
        return partial, err, False, math.nan, math.nan, "too few shells to judge the touch points"
    growth = inc[-1] / inc[-2] if inc[-2] != 0 else math.inf
    if abs(growth) > 1.25:
        msg = (
            f"touch-point shells grow by x{growth:.4g} per halving (power-law divergence); "
            f"value is the partial sum at eps={cutoff:.3g}"
        )
        return partial, err, False, math.nan, math.nan, msg
    limit = _aitken_limit(inc)
    noise = float(inc_err[-1]) + tol
    if abs(limit) <= 10 * noise:
        r = inc[-1] / inc[-2] if inc[-2] != 0 else 0.0
        if abs(r) < CONVERGENT_RATIO or abs(inc[-1]) <= noise:
            tail = inc[-1] * r / (1.0 - r) if abs(r) < 1 else 0.0
            value = partial + tail
            return value, err + abs(tail), ok, 0.0, value, "touch-point shells converge"
    rate = limit / math.log(2.0)
    finite = partial - rate * math.log(1.0 / cutoff)
    msg = (
        f"touch-point shells do not decay: increment per halving -> {limit:.6g}, "
        f"F_eps ~ {rate:.6g}*ln(1/eps) + {finite:.6g}; value is the partial sum at eps={cutoff:.3g}"
    )
    return partial, err, False, rate, finite, msg


def f_eval(
    a: float,
    cfg: Optional[QuadConfig] = None,
    exploit_symmetry: bool = True,
    touch_window: Optional[float] = None,
    touch_cutoff: float = DEFAULT_CUTOFF,
) -> FResult:
    """Evaluate F(a).

    With ``exploit_symmetry`` only the right moon on y > 0 is integrated
    (the integrand is even in x and in y); otherwise both moons and both
    half-planes are integrated independently.
    """
    if not math.isfinite(a):
        raise ValueError(f"a must be finite, got {a}")
    cfg = cfg or default_config()
    if a == 0:
        return FResult(a=a, value=0.0, abs_err=0.0, evals=0, converged=True, message="moons empty")
    window = default_window(a) if touch_window is None else touch_window
    segs, n_shells, cutoff = _y_segments(a, window, touch_cutoff)
    if not exploit_symmetry:
        segs = segs + [(-hi, -lo, lab) for lo, hi, lab in segs]
    v, e, ok, evals = _integrate_region(a, segs, cfg, right_only=exploit_symmetry)
    scale = 4.0 if exploit_symmetry else 1.0
    labels = np.array([s[2] for s in segs])
    v, e = scale * v, scale * e
    base = float(v[labels < 0].sum())
    base_err = float(e[labels < 0].sum())
    if n_shells == 0:
        return FResult(a=a, value=base, abs_err=base_err, evals=evals, converged=bool(ok.all()),
                       message="no touch points")
    inc = np.array([v[labels == k].sum() for k in range(n_shells)])
    inc_err = np.array([e[labels == k].sum() for k in range(n_shells)])
    value, err, conv, rate, finite, msg = _analyse_shells(
        base, base_err, inc, inc_err, cutoff,
        max(cfg.abs_tol, cfg.rel_tol * abs(base)), bool(ok.all()),
    )
    return FResult(
        a=a, value=value, abs_err=err, evals=evals, converged=conv,
        touchpoint_window=cutoff, increments=tuple(float(x) for x in inc),
        log_rate=rate, finite_part=finite, message=msg,
    )


def _scan_row(args) -> ScanRow:
    a, cfg, kwargs = args
    try:
        f = f_eval(a, cfg, **kwargs)
        if a == 0:
            return ScanRow(a=a, f=f, refinement_delta=0.0)
        fine = f_eval(a, cfg.tightened(10.0), **kwargs)
        return ScanRow(a=a, f=f, refinement_delta=abs(f.value - fine.value))
    except Exception as exc:  # recorded per row, never aborts the scan
        bad = FResult(a=a, value=math.nan, abs_err=math.nan, evals=0, converged=False, message=str(exc))
        return ScanRow(a=a, f=bad, refinement_delta=math.nan, error=f"{type(exc).__name__}: {exc}")


def scan(
    a_values: Sequence[float],
    cfg: Optional[QuadConfig] = None,
    jobs: int = 1,
    **kwargs,
) -> list[ScanRow]:
    """One row per ``a``, each with a rerun at 10x tighter tolerances.

    Rows are independent; ``jobs > 1`` farms them out to worker processes and
    the output order (and every bit of every row) does not depend on ``jobs``.
    """
    cfg = cfg or default_config()
    tasks = [(float(a), cfg, kwargs) for a in a_values]
    if jobs <= 1 or len(tasks) <= 1:
        return [_scan_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks), os.cpu_count() or 1)) as ex:
        return list(ex.map(_scan_row, tasks))


def touch_log_rate(a: float, radius: float = 1e-6, cfg: Optional[QuadConfig] = None):
    """Predicted coefficient of ln(1/eps) in F_eps from the touch-point asymptotics.

    Near a touch point (0, s) the right moon is the wedge |phi| < arcsin|a|
    around the +x direction, and J tends to a direction-dependent limit
    J(phi).  In polar coordinates the integrand J/x^2 contributes
    ``int J(phi)/cos(phi)^2 dphi * ln(R/r)``, once per moon per touch point.
    J is sampled on a circle of small ``radius``.  Independent of the shell
    extrapolation in :func:`f_eval`; the two should agree.
    """
    if not 0 < abs(a) < 1:
        raise ValueError("touch_log_rate needs 0 < |a| < 1")
    cfg = cfg or QuadConfig.from_tol(1e-7)
    s = math.sqrt(1.0 - a * a)
    psi = math.asin(abs(a))
    # the moon of the circle at +a opens towards sign(a) * x
    direction = 1.0 if a > 0 else -1.0

    def f(phi):
        x = direction * radius * np.cos(phi)
        y = s + radius * np.sin(phi)
        v, _, _, _ = j_batch(x, y, a, cfg.abs_tol, cfg.rel_tol / 10, cfg.max_depth, cfg.min_interval)
        return v / np.cos(phi) ** 2

    r = integrate_adaptive(f, (-psi, psi), cfg)
    return 4.0 * r.value, 4.0 * r.abs_err
