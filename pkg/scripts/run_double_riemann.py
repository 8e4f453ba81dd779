#!/usr/bin/env python3
"""High-field double Riemann problem at coarse and fine resolution.

The two snapshot CSVs feed the plotkit overlay (coarse markers on the fine
line).  The fine run takes several minutes.
"""

import argparse

from bimoment.cli import main as bimoment_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--coarse", type=int, default=100)
    ap.add_argument("--fine", type=int, default=2000)
    ap.add_argument("--epsilon", default="1e-6")
    ap.add_argument("--tfinal", type=float, default=0.1)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    for m in (args.coarse, args.fine):
        rc = bimoment_main([
            "--scenario", "double_riemann",
            "--elements", str(m),
            "--epsilon", args.epsilon,
            "--tfinal", str(args.tfinal),
            "--out", f"{args.out}/double_riemann_{m}",
        ])
        if rc != 0:
            raise SystemExit(rc)


if __name__ == "__main__":
    main()
