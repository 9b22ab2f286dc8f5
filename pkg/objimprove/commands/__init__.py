"""
Command registry for the objimprove CLI.
"""

from .bench_command import COMMAND_CLASS_MAPPINGS as _BENCH
from .generate_command import COMMAND_CLASS_MAPPINGS as _GENERATE
from .solve_command import COMMAND_CLASS_MAPPINGS as _SOLVE
from .verify_command import COMMAND_CLASS_MAPPINGS as _VERIFY

COMMAND_CLASS_MAPPINGS = {
    **_SOLVE,
    **_GENERATE,
    **_VERIFY,
    **_BENCH,
}

__all__ = ["COMMAND_CLASS_MAPPINGS"]
