"""Search random shears for maps satisfying the hyperbolic-derivative criterion.

Harmonic Mobius maps satisfy it trivially; this probes whether anything else
does on a sample grid.  A hit is evidence worth a closer look, not a proof.

    python3 scripts/probe_thm3.py --trials 200 --seed 0
"""
import argparse

import numpy as np

from schwarzian_lab.criteria import random_shear, thm3_check
from schwarzian_lab.schwarzian import GridSpec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    grid = GridSpec(levels=10, angular_base=32)
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(args.seed).spawn(args.trials)]
    best = []
    for k, rng in enumerate(rngs):
        v = thm3_check(random_shear(rng), grid)
        best.append((v.worst_margin, k, v.worst_point))
    best.sort(reverse=True)
    hits = sum(m >= -1e-9 for m, _, _ in best)
    print(f"{hits}/{args.trials} sampled shears satisfy the criterion on the grid")
    for m, k, z in best[:5]:
        print(f"trial {k:4d}: worst margin {m:+.6f} at {z:.4f}")


if __name__ == "__main__":
    main()
