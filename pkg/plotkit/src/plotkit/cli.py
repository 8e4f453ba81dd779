"""Command line for figure regeneration."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_IDS, FigureSpec, SchemaError, render


def build_spec(argv) -> FigureSpec:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="regenerate figures from bimoment CSV output")
    parser.add_argument("figure", choices=FIGURE_IDS)
    parser.add_argument("--snapshot", help="snapshot CSV (fig1/fig2/fig3)")
    parser.add_argument("--diagnostics", nargs="+",
                        help="diagnostics CSVs, one per epsilon (fig4a/fig4b)")
    parser.add_argument("--coarse", help="coarse snapshot CSV (fig5)")
    parser.add_argument("--fine", help="fine snapshot CSV (fig5)")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)

    if args.figure in ("fig1", "fig2", "fig3"):
        if not args.snapshot:
            parser.error(f"{args.figure} needs --snapshot")
        inputs = (args.snapshot,)
    elif args.figure in ("fig4a", "fig4b"):
        if not args.diagnostics:
            parser.error(f"{args.figure} needs --diagnostics")
        inputs = tuple(args.diagnostics)
    else:
        if not (args.coarse and args.fine):
            parser.error("fig5 needs --coarse and --fine")
        inputs = (args.coarse, args.fine)
    try:
        return FigureSpec(args.figure, inputs, args.out)
    except (FileNotFoundError, ValueError) as exc:
        parser.error(str(exc))


def main(argv=None) -> int:
    spec = build_spec(argv if argv is not None else sys.argv[1:])
    try:
        render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
