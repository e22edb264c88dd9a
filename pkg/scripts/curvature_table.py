"""Curvature estimates at the path, cycle and leaf cases for a list of p.

    python3 scripts/curvature_table.py --p 1.5 2 3 4
"""

import argparse
import csv
import math
import sys

from pcurv.graph import make_cycle, make_path
from pcurv.solver import SolverConfig, estimate_curvature

CASES = {
    "P3 middle": (make_path(3), 1),
    "P4 middle": (make_path(4), 1),
    "P5 leaf": (make_path(5), 0),
    "P7 center": (make_path(7), 3),
    "C3": (make_cycle(3), 0),
    "C4": (make_cycle(4), 0),
    "C5": (make_cycle(5), 0),
    "C6": (make_cycle(6), 0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, nargs="+", default=[1.5, 2.0, 3.0, 4.0])
    ap.add_argument("--dim", type=float, default=math.inf)
    ap.add_argument("--restarts", type=int, default=64)
    args = ap.parse_args()

    cfg = SolverConfig(restarts=args.restarts)
    out = csv.writer(sys.stdout)
    out.writerow(["case", "p", "m", "status", "value"])
    for p in args.p:
        for name, (g, x) in CASES.items():
            est = estimate_curvature(g, x, p, args.dim, cfg)
            value = f"{est.value:.12g}" if est.converged else ""
            out.writerow([name, p, "inf" if math.isinf(args.dim) else args.dim, est.status.value, value])


if __name__ == "__main__":
    main()
