"""Command line entry point."""
import argparse
import sys

from .data import CsvFormatError
from .render import render_box, render_profile


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render benchmark CSVs to image files.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("profile", help="performance-profile step plot")
    p.add_argument("csv", help="input profile CSV (solver,alpha,rho)")
    p.add_argument("image", help="output image path")
    b = sub.add_parser("box", help="error box plots, one panel per metric")
    b.add_argument("csv", help="input box CSV (basis_label,metric,value)")
    b.add_argument("image", help="output image path")
    args = parser.parse_args(argv)
    try:
        if args.command == "profile":
            render_profile(args.csv, args.image)
        else:
            render_box(args.csv, args.image)
    except (CsvFormatError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
