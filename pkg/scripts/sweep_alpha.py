"""Norm estimates of f_alpha against the closed-form upper bound, with refinement.

    python3 scripts/sweep_alpha.py --alphas 1,1.01,1.1,1.5,2 --refinements 2
"""
import argparse
import csv
import sys

from schwarzian_lab.maps import make_f_alpha
from schwarzian_lab.schwarzian import GridSpec, norm_bound_f_alpha, schwarzian_norm_estimate


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alphas", default="1,1.01,1.05,1.1,1.25,1.5,2,3")
    ap.add_argument("--refinements", type=int, default=2)
    ap.add_argument("--r-max", type=float, default=1 - 1e-4)
    args = ap.parse_args(argv)
    alphas = [float(a) for a in args.alphas.split(",")]

    w = csv.writer(sys.stdout)
    w.writerow(["alpha", "lower_bound", "extrapolated", "bound", "gap", "witness_re", "witness_im"])
    for a in alphas:
        est = schwarzian_norm_estimate(make_f_alpha(a), GridSpec(r_max=args.r_max), args.refinements)
        bound = norm_bound_f_alpha(a)
        ext = "" if est.extrapolated is None else f"{est.extrapolated:.10g}"
        z = est.witness_point
        w.writerow([f"{a:g}", f"{est.lower_bound:.10g}", ext, f"{bound:.10g}",
                    f"{bound - est.lower_bound:.3e}", f"{z.real:.8f}", f"{z.imag:.8f}"])


if __name__ == "__main__":
    main()
