"""Command-line front end: ``lunepv <command> [options]``.

Exit codes: 0 success, 2 domain or usage error, 3 finished but unconverged.
Numbers are written with 17 significant digits so CSV and JSON round-trip.
Defaults for ``--tol`` and ``--jobs`` come from ``LUNEPV_TOL`` and
``LUNEPV_JOBS`` when the flags are absent.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .full_integral import DEFAULT_CUTOFF, DEFAULT_TOL, f_eval, scan
from .geometry import GeometryError, Point, classify_point, delta
from .inner_integral import InnerDomainError, compare_inner, i_jordan, inner_numeric
from .mc_oracle import OracleDomainError, mc_estimate_f, mc_estimate_inner
from .quadrature import QuadConfig, QuadratureError

EXIT_OK, EXIT_DOMAIN, EXIT_UNCONVERGED = 0, 2, 3
SCAN_COLUMNS = ["a", "F", "abs_err", "evals", "converged", "refinement_delta"]
DOMAIN_ERRORS = (GeometryError, InnerDomainError, OracleDomainError, QuadratureError, ValueError)


def fmt(v):
    """Text form of one value: 17 significant digits for floats."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(format(v, ".17g")) if math.isfinite(v) else None
    return v


def render(rows: list[dict], columns: list[str], out_format: str, single: bool) -> str:
    if out_format == "json":
        objs = [{k: _json_value(r[k]) for k in columns} for r in rows]
        return json.dumps(objs[0] if single else objs, indent=None) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[k]) for k in columns])
    return buf.getvalue()


def _env_float(name, fallback):
    raw = os.environ.get(name)
    return float(raw) if raw else fallback


def _env_int(name, fallback):
    raw = os.environ.get(name)
    return int(raw) if raw else fallback


def _cfg(args, fallback_tol=None) -> QuadConfig:
    tol = args.tol if args.tol is not None else _env_float("LUNEPV_TOL", fallback_tol)
    return QuadConfig() if tol is None else QuadConfig.from_tol(tol)


def _jobs(args) -> int:
    return args.jobs if args.jobs is not None else _env_int("LUNEPV_JOBS", 1)


def _meta(args, cfg=None) -> dict:
    meta = {"command": args.command, "version": __version__}
    if cfg is not None:
        meta.update(abs_tol=cfg.abs_tol, rel_tol=cfg.rel_tol, max_depth=cfg.max_depth)
    return meta


def _emit(args, record: dict, columns: list[str]):
    text = render([record], columns, args.format, single=True)
    _write(args, text)


def _write(args, text):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_delta(args):
    p = Point(args.x, args.y)
    rec = {**_meta(args), "x": args.x, "y": args.y, "a": args.a,
           "region": classify_point(p, args.a).value, "delta": delta(p, args.a)}
    _emit(args, rec, list(rec))
    return EXIT_OK


def cmd_inner(args):
    cfg = _cfg(args)
    r = inner_numeric(args.x, args.y, args.center, cfg)
    rec = {**_meta(args, cfg), "x": args.x, "y": args.y, "center": args.center,
           "value": r.value, "abs_err": r.abs_err, "evals": r.evals, "converged": r.converged}
    _emit(args, rec, list(rec))
    return EXIT_OK if r.converged else EXIT_UNCONVERGED


def cmd_jordan(args):
    rec = {**_meta(args), "x": args.x, "y": args.y, "a": args.a,
           "value": i_jordan(args.x, args.y, args.a)}
    _emit(args, rec, list(rec))
    return EXIT_OK


def cmd_compare(args):
    cfg = _cfg(args)
    c = compare_inner(args.x, args.y, args.a, cfg)
    rec = {**_meta(args, cfg), "x": args.x, "y": args.y, "a": args.a,
           "i_num_plus": c.i_num_plus, "i_num_minus": c.i_num_minus, "i_jordan": c.i_jordan,
           "disc_plus": c.disc_plus, "disc_minus": c.disc_minus, "err_bound": c.err_bound}
    _emit(args, rec, list(rec))
    return EXIT_OK


def cmd_eval_f(args):
    cfg = _cfg(args, DEFAULT_TOL)
    r = f_eval(args.a, cfg, exploit_symmetry=not args.no_symmetry, touch_cutoff=args.cutoff)
    rec = {**_meta(args, cfg), "a": args.a, "F": r.value, "abs_err": r.abs_err,
           "evals": r.evals, "converged": r.converged, "touchpoint_window": r.touchpoint_window,
           "log_rate": r.log_rate, "finite_part": r.finite_part, "message": r.message}
    _emit(args, rec, list(rec))
    return EXIT_OK if r.converged else EXIT_UNCONVERGED


def scan_grid(a_min, a_max, steps):
    if steps < 1:
        raise ValueError("--steps must be >= 1")
    if steps == 1:
        return [float(a_min)]
    return [float(v) for v in np.linspace(a_min, a_max, steps)]


def scan_records(rows) -> list[dict]:
    return [{"a": r.a, "F": r.f.value, "abs_err": r.f.abs_err, "evals": r.f.evals,
             "converged": r.f.converged, "refinement_delta": r.refinement_delta,
             "message": r.error or r.f.message} for r in rows]


def cmd_scan(args):
    cfg = _cfg(args, DEFAULT_TOL)
    rows = scan(scan_grid(args.a_min, args.a_max, args.steps), cfg, jobs=_jobs(args),
                touch_cutoff=args.cutoff)
    records = scan_records(rows)
    columns = SCAN_COLUMNS + (["message"] if args.format == "json" else [])
    _write(args, render(records, columns, args.format, single=False))
    return EXIT_OK if all(r["converged"] for r in records) else EXIT_UNCONVERGED


def cmd_oracle(args):
    jobs = _jobs(args)
    if args.target == "inner":
        if args.x is None or args.y is None or args.center is None:
            raise ValueError("oracle inner needs --x, --y and --center")
        m = mc_estimate_inner(args.x, args.y, args.center, args.samples, args.seed, jobs=jobs)
        params = {"x": args.x, "y": args.y, "center": args.center}
    else:
        if args.a is None:
            raise ValueError("oracle f needs --a")
        m = mc_estimate_f(args.a, args.samples, args.seed, jobs=jobs, touch_cutoff=args.cutoff or 0.0)
        params = {"a": args.a}
    rec = {**_meta(args), "target": args.target, **params, "mean": m.mean,
           "std_err": m.std_err, "samples": m.samples, "seed": m.seed}
    _emit(args, rec, list(rec))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lunepv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lunepv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol=True):
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None, help="write to this file instead of stdout")
        if tol:
            p.add_argument("--tol", type=float, default=None)
        return p

    p = common(sub.add_parser("delta", help="region and moon sign of a point"), tol=True)
    for flag in ("--x", "--y", "--a"):
        p.add_argument(flag, type=float, required=True)
    p.set_defaults(func=cmd_delta)

    p = common(sub.add_parser("inner", help="inner integral over the disk at --center"))
    for flag in ("--x", "--y", "--center"):
        p.add_argument(flag, type=float, required=True)
    p.set_defaults(func=cmd_inner)

    p = common(sub.add_parser("jordan", help="Jordan's closed form"))
    for flag in ("--x", "--y", "--a"):
        p.add_argument(flag, type=float, required=True)
    p.set_defaults(func=cmd_jordan)

    p = common(sub.add_parser("compare", help="numeric inner integral at +-a vs Jordan's form"))
    for flag in ("--x", "--y", "--a"):
        p.add_argument(flag, type=float, required=True)
    p.set_defaults(func=cmd_compare)

    p = common(sub.add_parser("eval-f", help="the quadruple integral F(a)"))
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF, help="touch-point cutoff")
    p.add_argument("--no-symmetry", action="store_true", help="integrate both moons independently")
    p.set_defaults(func=cmd_eval_f)

    p = common(sub.add_parser("scan", help="F(a) on a grid"))
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--cutoff", type=float, default=DEFAULT_CUTOFF, help="touch-point cutoff")
    p.set_defaults(func=cmd_scan)

    p = common(sub.add_parser("oracle", help="Monte Carlo oracles"))
    p.add_argument("target", choices=["inner", "f"])
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--center", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--cutoff", type=float, default=None, help="drop outer points this close to the touch heights")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"lunepv {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
