"""Command-line entry point: ``optomech run|sweep|validate <config.toml>``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .runner import ConfigError, load_config, run, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="optomech", description="Atom-field-mirror effective-Hamiltonian simulator.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "evolve one configuration and write its outputs"),
        ("sweep", "run every value of the [sweep] section"),
        ("validate", "check a config file without running it"),
    ):
        s = sub.add_parser(name, help=text)
        s.add_argument("config", help="TOML configuration file")
        s.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
        s.add_argument("--out", default=None, help="output directory, overrides [outputs] dir")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(args.config)
        if args.out is not None:
            config = replace(config, output_dir=args.out)
        if args.command == "sweep" and config.sweep is None:
            raise ConfigError([("sweep", "config has no [sweep] section")])
    except ConfigError as exc:
        print("config error:", file=sys.stderr)
        for key, msg in exc.errors:
            print(f"  {key}: {msg}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        print("config ok")
        return EXIT_OK
    try:
        report = sweep(config, args.workers) if args.command == "sweep" else run(config, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
