"""Command-line entry point: ``dfnoma {analyze,simulate,sweep,compare,validate}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from dfnoma import __version__
from dfnoma.config import ConfigError
from dfnoma.runner import (
    JOBS,
    list_presets,
    load_spec,
    preset_path,
    run,
    summarize_sweep,
    with_output,
)

EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfnoma", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dfnoma {__version__}")
    parser.add_argument("--list-presets", action="store_true", help="print bundled preset names")
    sub = parser.add_subparsers(dest="job")
    for job in JOBS:
        p = sub.add_parser(job)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--config", type=Path, help="INI config file")
        src.add_argument("--preset", help="bundled figure preset, e.g. fig2")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a [system] key, or grid.<axis> / run.<key>")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int, help="SINR-level MC trials per point")
        p.add_argument("--symbols", type=int, help="QPSK frames per point for BER simulation")
        p.add_argument("--workers", type=int)
        p.add_argument("--out", type=Path, help="output path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        print("\n".join(list_presets()))
        return 0
    if not args.job:
        parser.print_help()
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        path = preset_path(args.preset) if args.preset else args.config
        text = path.read_text(encoding="utf-8") if path else None
        spec = load_spec(args.job, text, args.overrides, seed=args.seed, trials=args.trials,
                         symbols=args.symbols, workers=args.workers)
        spec = with_output(spec, args.out, args.format)
        status, rows, text = run(spec)
        if spec.out is None:
            sys.stdout.write(text)
        if args.job == "sweep":
            print(summarize_sweep(rows), file=sys.stderr)
        return status
    except (ConfigError, ValueError) as exc:
        print(f"dfnoma: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dfnoma: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
