"""Solver against the closed form at a star leaf, over hub degree and p.

    python3 scripts/star_leaf_sweep.py --p 2 2.5 3 4 --max-degree 10 > star.csv
"""

import argparse
import csv
import math
import sys

from pcurv.closed_forms import negativity_threshold, star_leaf_curvature
from pcurv.graph import make_star
from pcurv.solver import SolverConfig, estimate_curvature


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, nargs="+", default=[2.0, 3.0, 4.0])
    ap.add_argument("--max-degree", type=int, default=10)
    ap.add_argument("--restarts", type=int, default=32)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = SolverConfig(restarts=args.restarts, seed=args.seed)
    out = csv.writer(sys.stdout)
    out.writerow(["p", "degree", "solver", "closed_form", "abs_error", "threshold"])
    for p in args.p:
        for D in range(1, args.max_degree + 1):
            est = estimate_curvature(make_star(D), "leaf1", p, math.inf, cfg)
            want = star_leaf_curvature(D, p)
            out.writerow([p, D, f"{est.value:.12g}", f"{want:.12g}", f"{abs(est.value - want):.3g}", negativity_threshold(p)])


if __name__ == "__main__":
    main()
