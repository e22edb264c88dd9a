"""Ratio along the shrinking-edge family for 1 < p < 2, one row per t.

    python3 scripts/divergence_probe.py --p 1.2 1.5 1.8
"""

import argparse
import csv
import sys

from pcurv.graph import make_cycle, make_path
from pcurv.solver import probe_divergence

CASES = {
    "P3 middle": (make_path(3), 1),
    "P4 middle": (make_path(4), 1),
    "C4": (make_cycle(4), 0),
    "P5 leaf": (make_path(5), 0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, nargs="+", default=[1.2, 1.5, 1.8])
    ap.add_argument("--threshold", type=float, default=-1e6)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["case", "p", "t", "ratio", "below_threshold"])
    for p in args.p:
        for name, (g, x) in CASES.items():
            ev = probe_divergence(g, x, p, threshold=args.threshold)
            if ev is None:
                out.writerow([name, p, "", "", False])
                continue
            for t, r in ev.trace:
                out.writerow([name, p, f"{t:.0e}", f"{r:.6g}", r < args.threshold])


if __name__ == "__main__":
    main()
