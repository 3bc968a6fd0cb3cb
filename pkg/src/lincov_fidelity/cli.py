"""Command-line entry point for the study runner."""

import argparse
import sys

from .errors import IntegrationError
from .study import apply_overrides, default_config, load_config, run_study, save_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lincov-study",
        description="Propagate a Gaussian state through the three-body flow and "
        "tabulate linear-covariance fidelity metrics at each grid time.",
    )
    parser.add_argument("--config", help="sectioned key-value config file (default: built-in reference study)")
    parser.add_argument("--output", default="study_out", help="output directory (default: %(default)s)")
    parser.add_argument("--seed", type=int, help="override the Monte Carlo seed")
    parser.add_argument("--no-mc", action="store_true", help="disable the Monte Carlo variant")
    parser.add_argument("--no-ut", action="store_true", help="disable the unscented variant")
    parser.add_argument("--no-second-order", action="store_true",
                        help="disable the second-order variant")
    parser.add_argument("--dump-samples", type=float, action="append", default=[],
                        metavar="T", help="dump the sample cloud at the grid time nearest T "
                        "(repeatable)")
    parser.add_argument("--write-default-config", metavar="PATH",
                        help="write the reference study config to PATH and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.write_default_config:
        save_config(default_config(), args.write_default_config)
        print(f"wrote {args.write_default_config}")
        return 0
    try:
        cfg = load_config(args.config) if args.config else default_config()
        cfg = apply_overrides(cfg, seed=args.seed, disable_mc=args.no_mc,
                              disable_ut=args.no_ut,
                              disable_second_order=args.no_second_order)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_study(cfg, args.output, dump_times=args.dump_samples)
    except IntegrationError as exc:
        print(f"error: {exc} (last good time {exc.last_time:.6f})", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.csv_path}")
    print(f"wrote {result.manifest_path}")
    for p in result.dump_paths:
        print(f"wrote {p}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
