"""Command-line entry point for the figure renderer."""

import argparse
import sys

from .render import render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lincov-figures",
        description="Render metric time-series figures (and an optional sample "
        "scatter) from a study metrics.csv.",
    )
    parser.add_argument("--csv", required=True, help="metrics.csv from the study runner")
    parser.add_argument("--samples", help="sample-cloud dump CSV for the scatter figure")
    parser.add_argument("--out", default="figures", help="output directory (default: %(default)s)")
    parser.add_argument("--format", default="png", choices=("png", "pdf", "svg"),
                        help="image format (default: %(default)s)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render_all(args.csv, args.out, samples_csv=args.samples,
                             image_format=args.format)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
