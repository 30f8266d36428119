"""Command line for the figure renderer.

    diracff-plots render --csv out/fig1/ratio_profile.csv --out fig1.png
    diracff-plots render --csv ... --out ... --window -4 4
    diracff-plots render --csv ... --out ... --summary out/fig2/summary.json

The window may be given explicitly or read from a runner summary JSON.
Schema violations exit with code 2 and the expected header on stderr.
"""

from __future__ import annotations

import argparse
import sys

from .render import SchemaError, read_window_from_summary, render_figure


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="diracff-plots")
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render the 2x2 ratio figure")
    p_render.add_argument("--csv", required=True, help="runner ratio_profile.csv")
    p_render.add_argument("--out", required=True, help="output PNG path")
    p_render.add_argument(
        "--window", nargs=2, type=float, metavar=("LO", "HI"), default=None
    )
    p_render.add_argument(
        "--summary", default=None, help="runner summary.json to take the window from"
    )
    args = parser.parse_args(argv)

    window = tuple(args.window) if args.window else None
    if window is None and args.summary:
        try:
            window = read_window_from_summary(args.summary)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot read window from {args.summary}: {exc}", file=sys.stderr)
            return 2
    try:
        out = render_figure(args.csv, args.out, window=window)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
