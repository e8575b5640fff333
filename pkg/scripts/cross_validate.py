#!/usr/bin/env python3
"""Monte Carlo cross-validation of the analytic invasion rates.

Prints a table comparing the closed-form switched-model rates (one- and
two-species) against long-horizon ergodic averages on the reference figure
parameter sets.

Usage:
    python3 scripts/cross_validate.py [--horizon H] [--seed S]
"""

import argparse
import sys
import time

from chemoduo import invasion
from chemoduo.pdmp import SimOptions, ergodic_lambda0, ergodic_lambda_two_species
from chemoduo.sweep import figure_config


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--horizon", type=float, default=1e5)
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args()

    print(f"{'case':28s} {'analytic':>14s} {'monte carlo':>14s} {'stderr':>10s} {'sigmas':>7s}")
    t0 = time.time()
    for name in ("fig2-a", "fig2-b"):
        tmpl, _ = figure_config(name)
        for s, lam in ((0.25, 0.3), (0.5, 1.0), (0.75, 3.0)):
            c = tmpl.with_coupling(s=s, lam=lam)
            analytic = invasion.lambda0(c, "u")
            est = ergodic_lambda0(c, "u", SimOptions(horizon=args.horizon, seed=args.seed))
            z = abs(est.value - analytic) / est.std_error
            print(f"{name} L0(u) s={s} lam={lam:<5g} {analytic:14.6f} {est.value:14.6f} "
                  f"{est.std_error:10.2e} {z:7.2f}")
    for name in ("fig3-a", "fig3-b", "fig4-a", "fig4-b"):
        tmpl, _ = figure_config(name)
        c = tmpl.with_coupling(s=0.4, lam=1.0)
        for w in ("u", "v"):
            analytic = invasion.lambda_two_species(c, w)
            est = ergodic_lambda_two_species(c, w, SimOptions(horizon=args.horizon, seed=args.seed))
            z = abs(est.value - analytic) / est.std_error
            flag = "" if est.valid else "  [resident died]"
            print(f"{name} L({w})  s=0.4 lam=1   {analytic:14.6f} {est.value:14.6f} "
                  f"{est.std_error:10.2e} {z:7.2f}{flag}")
    print(f"total {time.time() - t0:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
