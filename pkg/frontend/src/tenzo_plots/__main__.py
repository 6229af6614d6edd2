"""Command-line figure renderer: --csv ... --fig <id> --out <image>."""

import argparse
import sys

from tenzo_plots.render import FIGURE_IDS, FigureSpec, MissingColumnsError, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="tenzo-plots")
    ap.add_argument("--csv", action="append", required=True,
                    help="input CSV (repeatable)")
    ap.add_argument("--fig", required=True, choices=FIGURE_IDS)
    ap.add_argument("--out", required=True, help="output image path")
    args = ap.parse_args(argv)
    spec = FigureSpec(tuple(args.csv), args.fig, args.out)
    try:
        render(spec)
    except (MissingColumnsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
