"""
Verify Command - check a game's structure or a candidate valuation
"""

from ..lib.constraints import build_inequations, solution_witness
from ..lib.game_core import GameFormatError, validate_game
from ..lib.pylogger import Log
from .utils import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED, read_game, read_valuation


class VerifyCommand:
    """
    ``verify FILE --structure`` validates the game; ``verify FILE VALUATION``
    checks that the valuation is the game's valuation and prints a witness.
    """

    COMMAND = "verify"
    HELP = "verify a game or a valuation"
    FUNCTION = "verify"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("file", help=".dpg game file")
        parser.add_argument("valuation", nargs="?", help="valuation file (JSON payload or '<vertex> <rational>' lines)")
        parser.add_argument("--structure", action="store_true", help="only validate the game structure")

    def verify(self, args) -> int:
        try:
            game = read_game(args.file, validate=False)
        except (OSError, GameFormatError) as e:
            Log.error(f"[VerifyCommand] {e}")
            return EXIT_INPUT_ERROR

        violations = validate_game(game)
        if violations:
            for violation in violations:
                print(violation)
            return EXIT_VERIFICATION_FAILED
        if args.structure or args.valuation is None:
            print(f"structure ok: {game.n_vertices} vertices, {game.n_edges} edges")
            return EXIT_OK

        try:
            val = read_valuation(args.valuation, game)
        except (OSError, ValueError) as e:
            Log.error(f"[VerifyCommand] {e}")
            return EXIT_INPUT_ERROR

        system = build_inequations(game)
        witness = solution_witness(game, val, system)
        print(witness.describe(system))
        return EXIT_OK if witness.ok else EXIT_VERIFICATION_FAILED


COMMAND_CLASS_MAPPINGS = {
    "verify": VerifyCommand,
}
