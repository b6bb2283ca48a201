"""plotgen command line.

Exit codes: 0 success, 2 bad arguments, 3 missing input file, 4 missing
column, 5 empty data.
"""

from __future__ import annotations

import argparse
import sys

from .render import EmptyDataError, MissingColumnError, PlotRequest, render

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_MISSING_COLUMN = 4
EXIT_EMPTY_DATA = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotgen", description="Render an experiment CSV as an SVG line chart"
    )
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--x", required=True, help="x-axis column")
    parser.add_argument("--y", required=True,
                        help="y-axis column (comma-separated for several lines)")
    parser.add_argument("--series", help="draw one line per distinct value of this column")
    parser.add_argument("--logx", action="store_true", help="logarithmic x axis")
    parser.add_argument("--title", help="chart title")
    parser.add_argument("--out", required=True, help="output SVG path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ys = tuple(col for col in args.y.split(",") if col)
    if not ys:
        print("error: --y names no columns", file=sys.stderr)
        return EXIT_USAGE
    request = PlotRequest(
        input_path=args.input,
        x=args.x,
        y=ys,
        output_path=args.out,
        series=args.series,
        title=args.title,
        logx=args.logx,
    )
    try:
        render(request)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except MissingColumnError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_MISSING_COLUMN
    except EmptyDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_DATA
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
