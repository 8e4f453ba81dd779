#!/usr/bin/env python3
"""Sweep the collision time for both relaxation test problems.

Each run writes diagnostics.csv with the equilibrium norm || M1 + rho E ||;
plotkit stacks the per-epsilon curves into the decay plot.  Every 20th step
is recorded to keep the curves readable.
"""

import argparse

from bimoment.cli import main as bimoment_main

EPSILONS = ("1e-1", "1e-2", "1e-3", "1e-4", "1e-5", "1e-6")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--elements", type=int, default=64)
    ap.add_argument("--tfinal", type=float, default=0.1)
    ap.add_argument("--closure", default="bigauss")
    ap.add_argument("--diag-stride", type=int, default=20)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    for scenario in ("ap_equilibrium", "ap_nonequilibrium"):
        for eps in EPSILONS:
            rc = bimoment_main([
                "--scenario", scenario,
                "--closure", args.closure,
                "--elements", str(args.elements),
                "--epsilon", eps,
                "--tfinal", str(args.tfinal),
                "--diag-stride", str(args.diag_stride),
                "--out", f"{args.out}/{scenario}_eps{eps}",
            ])
            if rc != 0:
                raise SystemExit(rc)


if __name__ == "__main__":
    main()
