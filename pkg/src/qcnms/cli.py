"""Command-line entry point: ``qcnms <scenario> --config <path|name> [--out <dir>]``."""

from __future__ import annotations

import argparse
import json
import sys

from .config import SCENARIOS, bundled_names, load_config
from .errors import ConfigError, DomainError, NumericFailure, QcnmsError
from .runner import run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcnms",
        description="Run a quasi-classical nonlinear oscillator scenario from a config file.",
    )
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument(
        "--config",
        required=True,
        help="path to an INI config, or the name of a bundled one "
        f"({', '.join(bundled_names())})",
    )
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    parser.add_argument("--quiet", action="store_true", help="do not print derived quantities")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if config.scenario != args.scenario:
            raise ConfigError(
                {"run.scenario": f"config is for {config.scenario!r}, command asked for {args.scenario!r}"}
            )
    except ConfigError as exc:
        print(f"qcnms: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = run(config, args.out)
    except DomainError as exc:
        # parameters passed validation but fall outside a model's domain
        print(f"qcnms: {config.scenario}: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, QcnmsError) as exc:
        print(f"qcnms: {config.scenario}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not args.quiet:
        print(json.dumps(manifest.derived, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
