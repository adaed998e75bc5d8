"""Seeded Monte Carlo oracles for the inner integral and for F(a).

Every block of ``BLOCK`` samples draws from its own Philox stream, keyed by
the seed and jumped by the block index, so the sample stream is a function of
(seed, sample index) only.  Blocks are reduced in index order with the
pairwise mean/variance update, which keeps results bit-identical whatever
the number of worker processes.

The 1/x' pole is tamed by antithetic pairing: a disk draw whose mirror
(-x', y') is also in the disk is averaged with it, which cancels the odd
part of the integrand exactly.  The pairing keeps the estimator unbiased
because the paired region is itself mirror symmetric.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import delta

BLOCK = 1 << 16


class OracleDomainError(ValueError):
    pass


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_err: float
    samples: int
    seed: int


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(block))


def _disk(rng, center, n):
    r = np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    return center + r * np.cos(phi), r * np.sin(phi)


def kernel_over_xp(x, y, xp, yp):
    """Integrand of the inner integral: Cauchy-type kernel divided by x'."""
    d = x - xp
    return d / (d * d + (y + yp) ** 2) / xp


def paired_values(f: Callable, xp, yp, center: float):
    """Per-draw antithetic values of ``f`` for uniform draws on the disk.

    Draws whose mirror (-x', y') lies in the disk return the pair average;
    the rest return ``f`` itself.
    """
    mirrored = (xp + center) ** 2 + yp ** 2 < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        own = f(xp, yp)
        mirror = np.where(mirrored, f(-xp, yp), 0.0)
    return np.where(mirrored, 0.5 * (own + mirror), own)


def _combine(stats):
    """Ordered pairwise merge of (count, mean, M2) block statistics."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in stats:
        tot = n + nb
        d = mb - mean
        mean += d * nb / tot
        m2 += m2b + d * d * n * nb / tot
        n = tot
    return n, mean, m2


def _block_stats(values):
    m = float(np.mean(values))
    return values.size, m, float(np.sum((values - m) ** 2))


def _inner_block(args):
    x, y, center, seed, block, n, f = args
    rng = _rng(seed, block)
    xp, yp = _disk(rng, center, n)
    g = f if f is not None else (lambda u, v: kernel_over_xp(x, y, u, v))
    return _block_stats(math.pi * paired_values(g, xp, yp, center))


def _f_block(args):
    a, seed, block, n, cutoff = args
    rng = _rng(seed, block)
    half_w = 1.0 + abs(a)
    box_area = 4.0 * half_w
    x = half_w * (2.0 * rng.random(n) - 1.0)
    y = 2.0 * rng.random(n) - 1.0
    xp_p, yp_p = _disk(rng, a, n)
    xp_m, yp_m = _disk(rng, -a, n)

    sign = delta((x, y), a)
    if cutoff:
        s = math.sqrt(1.0 - a * a)
        sign = np.where(np.abs(np.abs(y) - s) < cutoff, 0, sign)
    hit = sign != 0
    out = np.zeros(n)
    if hit.any():
        xs, ys, sg = x[hit], y[hit], sign[hit]
        pp, qp = xp_p[hit], yp_p[hit]
        pm, qm = xp_m[hit], yp_m[hit]

        def j_hat(xo):
            plus = paired_values(lambda u, v: kernel_over_xp(xo, ys, u, v), pp, qp, a)
            minus = paired_values(lambda u, v: kernel_over_xp(xo, ys, u, v), pm, qm, -a)
            return math.pi * (plus - minus)

        # outer antithetic pair (x, y) <-> (-x, y) shares the inner draws
        g_own = sg * j_hat(xs) / xs ** 2
        g_mir = -sg * j_hat(-xs) / xs ** 2
        out[hit] = box_area * 0.5 * (g_own + g_mir)
    return _block_stats(out)


def _run(worker, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        stats = [worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, os.cpu_count() or 1)) as ex:
            stats = list(ex.map(worker, tasks))
    return _combine(stats)


def _blocks(samples):
    full, rest = divmod(samples, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def _estimate(n, mean, m2, seed):
    var = m2 / (n - 1) if n > 1 else 0.0
    return McEstimate(mean=mean, std_err=math.sqrt(var / n), samples=n, seed=seed)


def mc_estimate_inner(
    x: float,
    y: float,
    center: float,
    samples: int,
    seed: int,
    integrand: Optional[Callable] = None,
    jobs: int = 1,
) -> McEstimate:
    """Monte Carlo estimate of the inner integral over the disk at (center, 0).

    ``integrand(xp, yp)`` replaces the default kernel/x' (used to test the
    sampler itself); it must be a module-level function when ``jobs > 1``.
    """
    if samples < 10_000:
        raise OracleDomainError("mc_estimate_inner needs at least 1e4 samples")
    tasks = [(x, y, center, seed, b, n, integrand) for b, n in enumerate(_blocks(samples))]
    return _estimate(*_run(_inner_block, tasks, jobs), seed)


def mc_estimate_f(
    a: float,
    samples: int,
    seed: int,
    jobs: int = 1,
    touch_cutoff: float = 0.0,
) -> McEstimate:
    """Nested Monte Carlo estimate of F(a) with one inner draw per disk per sample.

    The inner estimate is unbiased and enters linearly, so a single inner
    draw per outer point keeps the whole estimator unbiased; the inner noise
    is part of the per-sample variance.  Outer points are drawn uniformly on
    the bounding box and weighted by the moon sign (zero off the moons).

    A positive ``touch_cutoff`` drops outer points with ``||y| - s| <
    touch_cutoff`` around the touch heights ``s``, giving the same regularised
    quantity as :func:`lunepv.full_integral.f_eval` reports at that cutoff.
    """
    if a == 0:
        raise OracleDomainError("moons empty at a = 0")
    if not 0 < abs(a) < 1:
        raise OracleDomainError("mc_estimate_f needs 0 < |a| < 1")
    if samples < 1_000_000:
        raise OracleDomainError("mc_estimate_f needs at least 1e6 samples")
    tasks = [(a, seed, b, n, touch_cutoff) for b, n in enumerate(_blocks(samples))]
    return _estimate(*_run(_f_block, tasks, jobs), seed)
