#!/usr/bin/env python3
"""Reproduce all reference-figure data sets as CSV bundles.

Each figure yields a sign-map CSV (rates, signs, and verdicts of both models
on an (s, lambda) grid) and a zero-contour CSV.  Rendering is left to
external tools.

Usage:
    python3 scripts/reproduce_figures.py [--out DIR] [--jobs N]
                                         [--figures fig2-a fig4-b ...]
                                         [--lam-count N] [--s-count N]
"""

import argparse
import os
import sys
import time

from chemoduo.sweep import FIGURE_NAMES, SweepGrid, reproduce_figure


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default=os.environ.get("CHEMODUO_OUT", "figures-out"))
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--figures", nargs="+", default=list(FIGURE_NAMES), choices=FIGURE_NAMES)
    p.add_argument("--lam-count", type=int, default=64)
    p.add_argument("--s-count", type=int, default=63)
    args = p.parse_args()

    grid = SweepGrid(lam_count=args.lam_count, s_count=args.s_count)
    for name in args.figures:
        t0 = time.time()
        paths = reproduce_figure(name, args.out, grid=grid, jobs=args.jobs)
        print(f"{name}: {paths['signmap']}  ({time.time() - t0:.1f} s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
