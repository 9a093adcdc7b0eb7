"""Command-line interface.

Usage:
    welcherweg run <scenario.toml> [--set key=value]... [--output path]
                                   [--format csv|json] [--seed N]
    welcherweg validate <scenario.toml>

Exit codes:
    0  success
    1  validate found diagnostics
    2  parse error (malformed file, schema violation, bad override)
    3  domain error (a physical invariant was violated)
    4  I/O error (unreadable scenario, unwritable output)
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import IoError, ParseError, WelcherwegError
from .scenario import (
    apply_overrides,
    load_scenario,
    render_csv,
    render_json,
    run_scenario,
    validate_scenario,
)

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="welcherweg",
        description=(
            "Run interferometer and measurement-sampling scenarios from TOML files."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario and emit a result table")
    run.add_argument("scenario", help="path to a scenario TOML file")
    run.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help=(
            "override a scenario value; dotted paths or the shorthands "
            "phase, recoil, gamma; repeatable, last one wins"
        ),
    )
    run.add_argument(
        "--output",
        default=None,
        metavar="PATH",
        help="write the table to PATH instead of stdout",
    )
    run.add_argument(
        "--format",
        choices=("csv", "json"),
        default=None,
        help="output format (default: the scenario's 'format' key, then csv)",
    )
    run.add_argument(
        "--seed",
        type=int,
        default=None,
        help="override the sampling seed for stern_gerlach scenarios",
    )
    run.set_defaults(handler=_cmd_run)

    validate = sub.add_parser(
        "validate", help="check a scenario file and report every diagnostic"
    )
    validate.add_argument("scenario", help="path to a scenario TOML file")
    validate.set_defaults(handler=_cmd_validate)
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    raw = load_scenario(args.scenario)
    raw = apply_overrides(raw, args.overrides)
    table = run_scenario(raw, seed_override=args.seed)
    fmt = args.format or raw.get("format", "csv")
    text = render_csv(table) if fmt == "csv" else render_json(table)
    output = args.output or raw.get("output")
    if output is None:
        sys.stdout.write(text)
    else:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot write {output}: {exc}") from exc
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        raw = load_scenario(args.scenario)
    except IoError as exc:
        # for validation, an unreadable file is a failure to parse
        raise ParseError(str(exc)) from exc
    diagnostics = validate_scenario(raw)
    if diagnostics:
        for line in diagnostics:
            print(line)
        return 1
    print(f"{args.scenario}: OK")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except WelcherwegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
