#!/usr/bin/env python3
"""Run the three collisionless shock tubes and write their snapshot CSVs.

Outputs land in out/shocktube_fig{1,2,3}/ by default; plotkit turns each
snapshot into the six-panel figure.
"""

import argparse

from bimoment.cli import main as bimoment_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--elements", type=int, default=200)
    ap.add_argument("--tfinal", type=float, default=0.1)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    for scenario in ("shocktube_fig1", "shocktube_fig2", "shocktube_fig3"):
        rc = bimoment_main([
            "--scenario", scenario,
            "--elements", str(args.elements),
            "--tfinal", str(args.tfinal),
            "--out", f"{args.out}/{scenario}",
        ])
        if rc != 0:
            raise SystemExit(rc)


if __name__ == "__main__":
    main()
