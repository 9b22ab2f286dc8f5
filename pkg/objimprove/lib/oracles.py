"""
Independent ground truth for the solver.

- brute force: enumerate every joint strategy, take pointwise max-min of the
  strategy valuations and check it against the min-max;
- value iteration on dyadic rationals with a guaranteed sup-norm tolerance;
- an exhaustive LP oracle over all feasible bases, for small systems.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import FrozenSet, List, Optional, Tuple

from .constraints import (
    Basis,
    InequationSystem,
    OffsetFactors,
    basis_valuation,
    is_feasible,
    objective_value,
)
from .game_core import (
    Game,
    JointStrategy,
    Owner,
    Valuation,
    check_strategy_cap,
    format_rational,
    joint_strategy_valuation,
)
from .pylogger import Log
from .solver_config import DEFAULT_STRATEGY_CAP, DEFAULT_TOLERANCE


class OracleMethod(str, Enum):
    BRUTE_FORCE = "BRUTE_FORCE"
    VALUE_ITERATION = "VALUE_ITERATION"


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


class DeterminacyError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleReport:
    method: OracleMethod
    valuation: Valuation
    verdict: Verdict
    strategies: Optional[FrozenSet[JointStrategy]] = None
    vertex: Optional[int] = None
    expected: Optional[Fraction] = None
    actual: Optional[Fraction] = None

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def describe(self, game: Game) -> str:
        line = f"oracle {self.method.value}: {self.verdict.value}"
        if self.vertex is not None:
            line += (
                f" at vertex {game.label(self.vertex)}: oracle {format_rational(self.expected)},"
                f" solver {format_rational(self.actual)}"
            )
        return line

    def as_dict(self, game: Game):
        data = {"method": self.method.value, "verdict": self.verdict.value}
        if self.vertex is not None:
            data.update(
                vertex=game.label(self.vertex),
                oracle_value=format_rational(self.expected),
                solver_value=format_rational(self.actual),
            )
        return data


def brute_force_solve(
    game: Game, strategy_cap: int = DEFAULT_STRATEGY_CAP
) -> Tuple[Valuation, FrozenSet[JointStrategy]]:
    """
    Game valuation and all co-optimal joint strategies by enumeration.

    Returns:
        (valuation, set of joint strategies whose valuation is the game's)

    Raises:
        StrategyCapExceeded: above strategy_cap joint strategies
        DeterminacyError: if max-min and min-max disagree
    """
    check_strategy_cap(game, strategy_cap)
    max_vertices = [v for v in range(game.n_vertices) if game.owner(v) == Owner.MAX]
    min_vertices = [v for v in range(game.n_vertices) if game.owner(v) == Owner.MIN]
    max_choices = list(itertools.product(*(game.out_edges[v] for v in max_vertices)))
    min_choices = list(itertools.product(*(game.out_edges[v] for v in min_vertices)))

    def joint(max_choice, min_choice) -> JointStrategy:
        edges = [0] * game.n_vertices
        for v, e in zip(max_vertices, max_choice):
            edges[v] = e
        for v, e in zip(min_vertices, min_choice):
            edges[v] = e
        return JointStrategy(tuple(edges))

    table = [
        [joint_strategy_valuation(game, joint(mx, mn)).values for mn in min_choices] for mx in max_choices
    ]
    n = game.n_vertices
    max_min = tuple(max(min(row[j][v] for j in range(len(min_choices))) for row in table) for v in range(n))
    min_max = tuple(min(max(row[j][v] for row in table) for j in range(len(min_choices))) for v in range(n))
    if max_min != min_max:
        raise DeterminacyError(f"max-min {max_min} differs from min-max {min_max}")

    co_optimal = frozenset(
        joint(mx, mn)
        for i, mx in enumerate(max_choices)
        for j, mn in enumerate(min_choices)
        if table[i][j] == max_min
    )
    return Valuation(max_min), co_optimal


def _bellman(game: Game, val: List[Fraction]) -> List[Fraction]:
    result = []
    for v, out in enumerate(game.out_edges):
        options = [game.edges[e].weight + game.edges[e].discount * val[game.edges[e].dst] for e in out]
        result.append(max(options) if game.owner(v) == Owner.MAX else min(options))
    return result


def value_iteration(game: Game, tolerance: Fraction = DEFAULT_TOLERANCE) -> Valuation:
    """
    Approximate game valuation within ``tolerance`` in sup norm.

    Iterates are rounded to multiples of h = 2^-p with h <= tolerance (1 - λ*)^2 / 4.
    The stop test uses the exact residual r = |T(x) - x| before rounding: the
    returned round(T(x)) is within λ* r / (1 - λ*) + h/2 of the fixed point, and
    the loop stops once λ* r / (1 - λ*) <= tolerance / 2. Rounded iterates
    settle within h / (2 (1 - λ*)) of the fixed point, where the residual is
    already below that threshold, so the loop always terminates. Without
    discounting a single exact step is returned.
    """
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    contraction = max(e.discount for e in game.edges)
    current = [Fraction(0)] * game.n_vertices
    if contraction == 0:
        return Valuation(tuple(_bellman(game, current)))

    grid = tolerance * (1 - contraction) ** 2 / 4
    precision = 0
    while Fraction(1, 2**precision) > grid:
        precision += 1
    scale = 2**precision
    residual_bound = tolerance * (1 - contraction) / (2 * contraction)

    sweeps = 0
    while True:
        sweeps += 1
        exact = _bellman(game, current)
        residual = max(abs(a - b) for a, b in zip(exact, current))
        current = [Fraction(round(x * scale), scale) for x in exact]
        if residual <= residual_bound:
            break
    Log.debug(f"[Oracle] Value iteration converged after {sweeps} sweeps (precision 2^-{precision})")
    return Valuation(tuple(current))


def cross_check(
    game: Game,
    solution,
    tolerance: Fraction = DEFAULT_TOLERANCE,
    strategy_cap: int = DEFAULT_STRATEGY_CAP,
) -> OracleReport:
    """
    Compare a solver result against brute force (exact) or value iteration (within tolerance).

    Args:
        game: the solved game
        solution: a Solution or a bare Valuation
        tolerance: value-iteration tolerance
        strategy_cap: brute force runs up to this many joint strategies

    Returns:
        OracleReport; on FAIL it names the lowest offending vertex
    """
    actual = getattr(solution, "valuation", solution)
    if game.strategy_count() <= strategy_cap:
        method = OracleMethod.BRUTE_FORCE
        expected, strategies = brute_force_solve(game, strategy_cap)
        mismatch = next((v for v in range(game.n_vertices) if expected[v] != actual[v]), None)
    else:
        method = OracleMethod.VALUE_ITERATION
        expected, strategies = value_iteration(game, tolerance), None
        mismatch = next(
            (v for v in range(game.n_vertices) if abs(expected[v] - actual[v]) > tolerance), None
        )

    if mismatch is None:
        report = OracleReport(method, expected, Verdict.PASS, strategies)
        Log.info(f"[Oracle] {report.describe(game)}")
    else:
        report = OracleReport(
            method, expected, Verdict.FAIL, strategies, mismatch, expected[mismatch], actual[mismatch]
        )
        Log.warning(f"[Oracle] {report.describe(game)}")
    return report


def enumerate_feasible_bases(system: InequationSystem) -> List[Tuple[Basis, Valuation]]:
    """Every nonsingular, feasible choice of |V| inequations, with its valuation."""
    found = []
    for rows in itertools.combinations(range(len(system)), system.n_vertices):
        basis = Basis(rows)
        val = basis_valuation(system, basis)
        if val is not None and is_feasible(system, val):
            found.append((basis, val))
    return found


def brute_force_lp_optimum(
    system: InequationSystem, strategy: JointStrategy, alpha: Optional[OffsetFactors] = None
) -> Fraction:
    """Minimum of the strategy objective over all feasible basis valuations."""
    return min(objective_value(system.game, val, strategy, alpha) for _, val in enumerate_feasible_bases(system))
