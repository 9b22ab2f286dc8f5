"""
Solve Command - compute the exact valuation and co-optimal strategies of a game
"""

import json
import sys

from ..lib.conditioning import ConditioningError
from ..lib.game_core import GameFormatError, InvalidGameError
from ..lib.improvement import IterationLimitExceeded, SolverError, format_trace, solve
from ..lib.lp_engine import LPEngineError
from ..lib.oracles import cross_check
from ..lib.pylogger import Log
from ..lib.solver_config import NoisePolicy, PivotMode, TraceLevel, load_solver_config
from .utils import (
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_SOLVER_ERROR,
    EXIT_VERIFICATION_FAILED,
    read_game,
    solution_payload,
)


class SolveCommand:
    """
    Run objective improvement on a .dpg file and print the valuation.
    """

    COMMAND = "solve"
    HELP = "solve a discounted payoff game exactly"
    FUNCTION = "solve"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("file", help=".dpg game file")
        parser.add_argument("--seed", type=int, help="seed for offset factors and weight noise")
        parser.add_argument("--alpha", choices=["on", "off"], help="random offset factors (default on)")
        parser.add_argument(
            "--noise", choices=[p.value for p in NoisePolicy], help="weight noise policy (default on-degeneracy)"
        )
        parser.add_argument(
            "--pivot", choices=[m.value for m in PivotMode], help="pivoting mode (default lp-first)"
        )
        parser.add_argument("--trace", choices=[t.value for t in TraceLevel], help="print the iteration trace")
        parser.add_argument("--check", action="store_true", help="cross-check the result with an oracle")
        parser.add_argument("--json", action="store_true", help="print a JSON payload")

    def solve(self, args) -> int:
        """
        Args:
            args: parsed command-line namespace

        Returns:
            process exit code
        """
        try:
            config, oracle_config = load_solver_config(args.config)
            if args.seed is not None and args.seed < 0:
                raise ValueError(f"seed must be >= 0, got {args.seed}")
            config = config.with_overrides(
                seed=args.seed,
                use_offset_factors=None if args.alpha is None else args.alpha == "on",
                noise_policy=NoisePolicy(args.noise) if args.noise else None,
                pivot_mode=PivotMode(args.pivot) if args.pivot else None,
                trace_level=TraceLevel(args.trace) if args.trace else None,
            )
            game = read_game(args.file)
        except (OSError, GameFormatError, InvalidGameError, ValueError, RuntimeError) as e:
            Log.error(f"[SolveCommand] {e}")
            return EXIT_INPUT_ERROR

        Log.info(f"[SolveCommand] Solving {args.file}: {game.n_vertices} vertices, {game.n_edges} edges")
        try:
            solution = solve(game, config)
        except IterationLimitExceeded as e:
            Log.error(f"[SolveCommand] {e}")
            print(format_trace(game, e.trace, TraceLevel.FULL), file=sys.stderr)
            return EXIT_SOLVER_ERROR
        except (ConditioningError, LPEngineError, SolverError) as e:
            Log.error(f"[SolveCommand] {e}")
            return EXIT_SOLVER_ERROR

        report = None
        if args.check:
            report = cross_check(game, solution, oracle_config.tolerance, oracle_config.strategy_cap)

        if args.json:
            print(json.dumps(solution_payload(game, solution, report, config.trace_level), indent=2))
        else:
            print(f"{solution.valuation.describe(game)}; strategy: {solution.strategies.describe(game)}")
            if config.trace_level != TraceLevel.NONE:
                print(solution.format_trace(game, config.trace_level))
            if report is not None:
                print(report.describe(game))

        if report is not None and not report.passed:
            return EXIT_VERIFICATION_FAILED
        return EXIT_OK


COMMAND_CLASS_MAPPINGS = {
    "solve": SolveCommand,
}
