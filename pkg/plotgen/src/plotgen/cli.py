"""Command line front end: one figure per invocation."""

import argparse
import sys

from .render import METRICS, STYLES, MissingInput, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plotgen",
        description="Render 2x2 per-category panel figures from exported "
                    "simulation run CSVs.")
    p.add_argument("metric", choices=METRICS,
                   help="which quantity to plot")
    p.add_argument("style", choices=STYLES,
                   help="time series or cumulative distribution")
    p.add_argument("--runs", nargs="+", required=True, metavar="DIR",
                   help="run directories to overlay, one line per run")
    p.add_argument("--out", required=True, metavar="FILE",
                   help="output image path; format follows the extension")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(args.runs, args.metric, args.style, args.out)
    except MissingInput as exc:
        print(f"error: missing input file: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
