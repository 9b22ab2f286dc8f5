"""
Conditioning: make a game sharp and improving, then map answers back.

Two randomisations are available, both drawn on a 2^32-step rational grid
from per-edge numpy streams seeded with (stream tag, seed, draw, edge id):

- offset factors α_e in (1, 2) bias the objective without changing the
  game's valuation;
- additive weight noise below (1 - λ*)/3 times a gap lower bound keeps every
  non-co-optimal joint strategy non-co-optimal, so co-optimal strategies of
  the perturbed game are co-optimal for the original.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

import numpy as np

from .constraints import OffsetFactors, offset, verify_solution
from .game_core import (
    Game,
    JointStrategy,
    Valuation,
    all_joint_strategies,
    check_strategy_cap,
    format_rational,
    joint_strategy_valuation,
)
from .pylogger import Log

GRID = 2**32
ALPHA_STREAM = 0xA1FA
NOISE_STREAM = 0x0153


class ConditioningError(RuntimeError):
    pass


@dataclass(frozen=True)
class ConditioningReport:
    contraction: Fraction
    gap_lower_bound: Fraction
    epsilon: Fraction = Fraction(0)
    noise_seed: Optional[int] = None
    noise_draw: int = 0
    alpha_seed: Optional[int] = None
    alpha_draw: int = 0
    resamples: int = 0

    def as_dict(self) -> Dict[str, object]:
        return {
            "contraction": format_rational(self.contraction),
            "gap_lower_bound": format_rational(self.gap_lower_bound),
            "epsilon": format_rational(self.epsilon),
            "noise_seed": self.noise_seed,
            "noise_draw": self.noise_draw,
            "alpha_seed": self.alpha_seed,
            "alpha_draw": self.alpha_draw,
            "resamples": self.resamples,
        }


def contraction(game: Game) -> Fraction:
    return max(e.discount for e in game.edges)


def gap_lower_bound(game: Game) -> Fraction:
    """
    1 / (common · max_e denom(λ_e) denom(w_e)).

    common multiplies, over all vertices, the square of the largest discount
    denominator on an outgoing edge times the largest weight denominator, so
    it is a common denominator of every joint strategy's valuation.
    """
    common = 1
    for out in game.out_edges:
        discount_den = max(game.edges[e].discount.denominator for e in out)
        weight_den = max(game.edges[e].weight.denominator for e in out)
        common *= discount_den**2 * weight_den
    edge_den = max(e.discount.denominator * e.weight.denominator for e in game.edges)
    return Fraction(1, common * edge_den)


def strategy_gap(game: Game, strategy: JointStrategy) -> Fraction:
    """-min offset at the strategy's own valuation; positive iff the strategy is not co-optimal."""
    val = joint_strategy_valuation(game, strategy)
    return -min(offset(game, val, e.id) for e in game.edges)


def true_gap(game: Game, strategy_cap: int = 2**20) -> Optional[Fraction]:
    """
    Minimal gap over non-co-optimal joint strategies, by enumeration.

    Returns:
        the gap, or None when every joint strategy is co-optimal

    Raises:
        StrategyCapExceeded: above strategy_cap joint strategies
    """
    check_strategy_cap(game, strategy_cap)
    gap: Optional[Fraction] = None
    for strategy in all_joint_strategies(game):
        gamma = strategy_gap(game, strategy)
        if gamma > 0 and (gap is None or gamma < gap):
            gap = gamma
    return gap


def noise_bound(game: Game, gap: Optional[Fraction] = None) -> Fraction:
    """(1 - λ*)/3 · gap, with the cheap lower bound when no gap is given."""
    gap = gap if gap is not None else gap_lower_bound(game)
    return (1 - contraction(game)) / 3 * gap


def _stream(tag: int, seed: int, draw: int, edge_id: int) -> np.random.Generator:
    return np.random.default_rng([tag, seed, draw, edge_id])


def perturb_weights(
    game: Game, epsilon: Fraction, seed: int, gap: Optional[Fraction] = None, draw: int = 0
) -> Game:
    """
    Add independent noise k/2^32 · ε, k uniform in (-2^32, 2^32), to every weight.

    Args:
        game: game to perturb
        epsilon: noise amplitude, 0 < ε <= (1 - λ*)/3 · gap
        seed: stream seed
        gap: gap to check ε against; defaults to gap_lower_bound(game)
        draw: resample index, selects fresh streams

    Raises:
        ConditioningError: if ε violates the bound
    """
    epsilon = Fraction(epsilon)
    bound = noise_bound(game, gap)
    if not 0 < epsilon <= bound:
        raise ConditioningError(
            f"noise exceeds gap bound: epsilon {format_rational(epsilon)} not in (0, {format_rational(bound)}]"
        )
    weights = []
    for e in game.edges:
        k = int(_stream(NOISE_STREAM, seed, draw, e.id).integers(-GRID + 1, GRID))
        weights.append(e.weight + Fraction(k, GRID) * epsilon)
    return game.with_weights(weights)


def sample_offset_factors(game: Game, seed: int, draw: int = 0) -> OffsetFactors:
    """α_e = 1 + k/2^32 with k uniform in [1, 2^32 - 1], one stream per edge."""
    factors = []
    for e in game.edges:
        k = int(_stream(ALPHA_STREAM, seed, draw, e.id).integers(1, GRID))
        factors.append(1 + Fraction(k, GRID))
    return OffsetFactors(tuple(factors))


def recover_exact_solution(original: Game, strategy: JointStrategy) -> Valuation:
    """
    Valuation of a strategy that was co-optimal in a perturbed copy, on the original game.

    Raises:
        ConditioningError: if the result is not the original game's valuation
    """
    val = joint_strategy_valuation(original, strategy)
    if not verify_solution(original, val):
        raise ConditioningError("perturbation too large or gap bound violated")
    Log.debug(f"[Conditioning] Recovered exact valuation from strategy {strategy.describe(original)}")
    return val
