"""Command line entry point: ``ancdm <experiment> --config FILE [--seed N] [--out PATH] [--workers N]``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import ConfigError, NumericFailure
from .harness import EXPERIMENTS, config_from_mapping, load_config, run, write_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ancdm", description=__doc__)
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="flat YAML file with ExperimentConfig keys")
    parser.add_argument("--seed", type=_seed)
    parser.add_argument("--out", help="CSV destination (default: stdout)")
    parser.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which is also our config code
        return int(exc.code or 0)
    try:
        if args.config:
            cfg = load_config(args.config, seed=args.seed)
        else:
            cfg = config_from_mapping({}, seed=args.seed)
        cfg = replace(cfg, experiment=args.experiment)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        rows = run(cfg, workers=args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERIC
    text = write_csv(rows, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
