"""
Generate Command - write a random, valid .dpg game
"""

from ..lib.game_core import generate_random_game, serialize_game
from ..lib.pylogger import Log
from .utils import DEFAULT_DISCOUNTS, EXIT_INPUT_ERROR, EXIT_OK, parse_discount_list, write_text


class GenerateCommand:
    COMMAND = "generate"
    HELP = "generate a random game"
    FUNCTION = "generate"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--vertices", type=int, required=True, help="number of vertices (>= 1)")
        parser.add_argument("--degree", type=int, required=True, help="outgoing edges per vertex (>= 1)")
        parser.add_argument("--seed", type=int, required=True, help="generator seed (>= 0)")
        parser.add_argument("--weight-bound", type=int, default=4, help="weights drawn from [-W, W] (default 4)")
        parser.add_argument(
            "--discounts", default=DEFAULT_DISCOUNTS, help=f"comma-separated discount pool (default {DEFAULT_DISCOUNTS})"
        )
        parser.add_argument("--output", "-o", help="output file (default stdout)")

    def generate(self, args) -> int:
        try:
            if args.seed < 0:
                raise ValueError(f"seed must be >= 0, got {args.seed}")
            discounts = parse_discount_list(args.discounts)
            game = generate_random_game(args.vertices, args.degree, args.weight_bound, discounts, args.seed)
        except ValueError as e:
            Log.error(f"[GenerateCommand] {e}")
            return EXIT_INPUT_ERROR

        try:
            write_text(serialize_game(game), args.output)
        except OSError as e:
            Log.error(f"[GenerateCommand] Failed to write {args.output}: {e}")
            return EXIT_INPUT_ERROR

        Log.info(f"[GenerateCommand] Wrote game with {game.n_vertices} vertices, {game.n_edges} edges")
        return EXIT_OK


COMMAND_CLASS_MAPPINGS = {
    "generate": GenerateCommand,
}
