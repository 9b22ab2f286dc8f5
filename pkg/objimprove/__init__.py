"""
dpg-objective-improvement

Exact solver for discounted payoff games by symmetric objective improvement:
both players' strategies are improved together by minimising a
strategy-indexed offset objective over the game's fixed inequation system,
using exact rational linear programming.
"""

from .lib.constraints import build_inequations, verify_solution
from .lib.game_core import Game, JointStrategy, Valuation, parse_game, serialize_game
from .lib.improvement import Solution, solve
from .lib.solver_config import SolverConfig

__version__ = "0.1.0"

__all__ = [
    "Game",
    "JointStrategy",
    "Solution",
    "SolverConfig",
    "Valuation",
    "build_inequations",
    "parse_game",
    "serialize_game",
    "solve",
    "verify_solution",
]
