"""
Logger setup for dpg-objective-improvement.

Every module logs through ``Log`` with a bracketed component prefix,
e.g. ``Log.info("[Solver] ...")``. Output goes to stderr so that CSV and
JSON written to stdout by the CLI stay machine-readable.
"""

import os
import sys

from loguru import logger as Log

DEFAULT_LEVEL = "WARNING"
LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {message}"

_handler_id = None


def set_log_level(level: str) -> None:
    """
    (Re)install the stderr sink at the given level.

    Args:
        level: loguru level name ("DEBUG", "INFO", "WARNING", ...)
    """
    global _handler_id
    if _handler_id is not None:
        Log.remove(_handler_id)
    _handler_id = Log.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)


def verbosity_to_level(verbosity: int) -> str:
    """Map the CLI's -v count to a level name."""
    if verbosity >= 2:
        return "DEBUG"
    if verbosity == 1:
        return "INFO"
    return os.environ.get("OBJIMPROVE_LOG_LEVEL", DEFAULT_LEVEL)


# loguru ships with a DEBUG sink on stderr; replace it with ours
Log.remove()
set_log_level(os.environ.get("OBJIMPROVE_LOG_LEVEL", DEFAULT_LEVEL))

__all__ = ["Log", "set_log_level", "verbosity_to_level"]
