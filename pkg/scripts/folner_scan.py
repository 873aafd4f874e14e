"""Følner search on the half line over a range of indices.

usage: python scripts/folner_scan.py [--epsilon 0.5] [--max-size 10000]
"""

import argparse
import time
from fractions import Fraction

from subspec.folner import interval_search, spectral_cut_search
from subspec.graph_core import a_infinity

INDICES = ("4", "17/4", "9/2", "5", "6")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--max-size", type=int, default=10_000)
    args = ap.parse_args()
    print("lambda_inv  method     tag          |F|    best_ratio  seconds")
    for s in INDICES:
        g = a_infinity(Fraction(s))
        for name, search in (("interval", interval_search), ("spectral", spectral_cut_search)):
            t0 = time.perf_counter()
            out = search(g, args.epsilon, args.max_size)
            size = len(out.certificate.F) if out.certificate else out.best_size
            print(f"{s:10s}  {name:9s}  {out.tag:11s}  {size:5d}  {out.best_ratio:10.6f}"
                  f"  {time.perf_counter() - t0:7.2f}")


if __name__ == "__main__":
    main()
