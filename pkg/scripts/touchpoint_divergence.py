"""Show how F_eps(a) behaves as the touch-point cutoff eps shrinks.

For each a: the shell increments per halving of eps, the log rate they imply,
the rate predicted from the local wedge asymptotics, and F_eps at a few
cutoffs.  Also runs the Monte Carlo oracle with the same cutoff.
"""
import argparse

from lunepv.full_integral import default_config, f_eval, touch_log_rate
from lunepv.mc_oracle import mc_estimate_f


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, nargs="+", default=[0.3, 0.5, 0.8])
    ap.add_argument("--tol", type=float, default=1e-4)
    ap.add_argument("--cutoffs", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4, 1e-5])
    ap.add_argument("--mc-samples", type=int, default=10_000_000)
    args = ap.parse_args()

    cfg = default_config(args.tol)
    for a in args.a:
        predicted, perr = touch_log_rate(a)
        print(f"a = {a}: asymptotic log rate {predicted:.6f} (+- {perr:.1e})")
        for cutoff in args.cutoffs:
            r = f_eval(a, cfg, touch_cutoff=cutoff)
            mc = mc_estimate_f(a, args.mc_samples, seed=1, touch_cutoff=r.touchpoint_window) if r.touchpoint_window > 1e-3 else None
            mc_txt = f"  MC {mc.mean:.4f} +- {mc.std_err:.4f}" if mc else ""
            print(f"  eps={r.touchpoint_window:.3e}  F_eps={r.value:.6f}  log_rate={r.log_rate:.6f}  "
                  f"finite_part={r.finite_part:.6f}{mc_txt}")
        print("  increments per halving:", " ".join(f"{v:.5f}" for v in r.increments))


if __name__ == "__main__":
    main()
