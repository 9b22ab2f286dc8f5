#!/usr/bin/env python3
"""
Command-line entry point for dpg-objective-improvement

    objimprove solve games/g1.dpg
    objimprove generate --vertices 6 --degree 3 --seed 7 -o game.dpg
    objimprove verify games/g1.dpg valuation.txt
    objimprove bench --count 200 --vertices 6 --degree 3 --seed 1 --check
"""

import argparse
import sys
from typing import List, Optional

from . import __version__
from .commands import COMMAND_CLASS_MAPPINGS
from .lib.pylogger import set_log_level, verbosity_to_level


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="objimprove",
        description="Exact discounted payoff game solver (symmetric objective improvement)",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    parser.add_argument("--config", help="solver_config.yaml (overrides $OBJIMPROVE_CONFIG)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command_cls in COMMAND_CLASS_MAPPINGS.items():
        sub = subparsers.add_parser(name, help=command_cls.HELP)
        command_cls.add_arguments(sub)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch to the command class.

    Returns:
        process exit code (argparse usage errors exit with 2)
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    set_log_level(verbosity_to_level(args.verbose))

    command_cls = COMMAND_CLASS_MAPPINGS[args.command]
    command = command_cls()
    return getattr(command, command_cls.FUNCTION)(args)


if __name__ == "__main__":
    sys.exit(main())
