"""
Objective improvement: the symmetric solver loop.

Both players' strategies are improved together. For the current joint
strategy σ the LP minimises f_σ over the fixed inequation system; the loop
stops when the optimum is 0 or the optimal valuation defines strategies for
every vertex. Otherwise σ is improved locally (every vertex switches to a
strictly smaller offset at the same valuation) or non-locally (a neighbouring
basis valuation admits a strategy with a smaller objective). When neither
exists the objective's offset factors are resampled, and if that does not
help, the weights receive bounded noise.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import FrozenSet, List, Optional

import numpy as np
from tabulate import tabulate

from .conditioning import (
    ConditioningError,
    ConditioningReport,
    contraction,
    gap_lower_bound,
    noise_bound,
    perturb_weights,
    recover_exact_solution,
    sample_offset_factors,
)
from .constraints import (
    Basis,
    InequationSystem,
    OffsetFactors,
    biased_offset,
    build_inequations,
    objective_value,
    offset,
    sharp_edges,
    strategies_defined_by,
    verify_solution,
)
from .game_core import (
    Game,
    InvalidGameError,
    JointStrategy,
    Valuation,
    format_rational,
    lowest_edge_strategy,
    validate_game,
)
from .lp_engine import (
    LPIterationLimitError,
    SimplexState,
    detect_degeneracy,
    neighbouring_bases,
    solve_lp,
)
from .pylogger import Log
from .solver_config import NoisePolicy, PivotMode, SolverConfig, TraceLevel


class IterationKind(str, Enum):
    LOCAL = "LOCAL"
    NONLOCAL = "NONLOCAL"
    TERMINAL = "TERMINAL"
    RECONDITION = "RECONDITION"


class SubgameError(ValueError):
    pass


class IterationLimitExceeded(RuntimeError):
    def __init__(self, message: str, trace: List["IterationRecord"]):
        super().__init__(message)
        self.trace = list(trace)


class SolverError(RuntimeError):
    """The loop ended on a valuation that is not the game's valuation."""


@dataclass(frozen=True)
class IterationRecord:
    """
    One step of the loop.

    ``optimum`` is the plain objective f_σ(val) of the strategy the LP minimised;
    ``biased_optimum`` is the minimised objective itself, which differs from
    ``optimum`` only when offset factors are active.
    """

    index: int
    kind: IterationKind
    strategy_before: JointStrategy
    strategy_after: JointStrategy
    optimum: Fraction
    biased_optimum: Fraction
    basis: Basis
    valuation: Valuation
    pivots: int


@dataclass
class Solution:
    valuation: Valuation
    strategies: JointStrategy
    trace: List[IterationRecord]
    conditioning: ConditioningReport
    iterations: int = 0
    pivots: int = 0

    def format_trace(self, game: Game, level: TraceLevel = TraceLevel.SUMMARY) -> str:
        return format_trace(game, self.trace, level)


@dataclass(frozen=True)
class NonLocalStep:
    """A strictly better strategy found at a neighbouring basis valuation."""

    strategy: JointStrategy
    basis: Basis
    valuation: Valuation
    objective: Fraction


# ---------------------------------------------------------------------------
# Strategy operations
# ---------------------------------------------------------------------------


def choose_initial_strategies(game: Game, seed: Optional[int] = None) -> JointStrategy:
    """Lowest edge id per vertex, or a uniformly random edge per vertex for a given seed."""
    if seed is None:
        return lowest_edge_strategy(game)
    rng = np.random.default_rng(seed)
    return JointStrategy(tuple(out[int(rng.integers(0, len(out)))] for out in game.out_edges))


def _weighted_offset(game: Game, val: Valuation, e: int, alpha: Optional[OffsetFactors]) -> Fraction:
    return offset(game, val, e) if alpha is None else biased_offset(game, val, e, alpha)


def pointwise_best_strategy(
    game: Game, val: Valuation, alpha: Optional[OffsetFactors], keep: Optional[JointStrategy] = None
) -> JointStrategy:
    """
    Minimum (biased) offset edge per vertex.

    Ties keep the edge of ``keep`` when it is among the minima, else the lowest edge id.
    """
    chosen = []
    for v, out in enumerate(game.out_edges):
        offsets = {e: _weighted_offset(game, val, e, alpha) for e in out}
        best = min(offsets.values())
        if keep is not None and offsets[keep.edge(v)] == best:
            chosen.append(keep.edge(v))
        else:
            chosen.append(min(e for e in out if offsets[e] == best))
    return JointStrategy(tuple(chosen))


def local_improvements(
    game: Game, val: Valuation, strategy: JointStrategy, alpha: Optional[OffsetFactors] = None
) -> Optional[JointStrategy]:
    """Switch every vertex that has a strictly smaller offset; None if no vertex does."""
    improved = pointwise_best_strategy(game, val, alpha, keep=strategy)
    return None if improved == strategy else improved


def stale_edges(
    game: Game, val: Valuation, strategy: JointStrategy, alpha: Optional[OffsetFactors] = None
) -> FrozenSet[int]:
    stale = set()
    for v, out in enumerate(game.out_edges):
        current = _weighted_offset(game, val, strategy.edge(v), alpha)
        stale.update(e for e in out if _weighted_offset(game, val, e, alpha) == current)
    return frozenset(stale)


def candidate_edge_set(
    game: Game, val: Valuation, strategy: JointStrategy, alpha: Optional[OffsetFactors] = None
) -> FrozenSet[int]:
    """Sharp edges plus the strategy's edges."""
    return sharp_edges(game, val) | frozenset(strategy.edges)


def subgame(game: Game, edges) -> Game:
    """
    Restrict the game to the given edges.

    Raises:
        SubgameError: if a vertex keeps no outgoing edge
    """
    edges = set(edges)
    for v, out in enumerate(game.out_edges):
        if not any(e in edges for e in out):
            raise SubgameError(f"vertex without outgoing edge in restriction: {game.label(v)}")
    return game.restrict(edges)


def non_local_improvement(
    game: Game,
    system: InequationSystem,
    val: Valuation,
    basis: Basis,
    strategy: JointStrategy,
    alpha: Optional[OffsetFactors] = None,
) -> Optional[NonLocalStep]:
    """
    Scan neighbouring basis valuations for a strategy with a smaller objective.

    Returns:
        the first step with f_σ'(val'') < f_σ(val), in neighbour order, or None
    """
    state = SimplexState.from_basis(system, basis, strategy, alpha)
    if state is None:
        raise ValueError(f"basis {basis.edges} is not a feasible basis")
    current = objective_value(game, val, strategy, alpha)
    for neighbour_basis, neighbour_val in neighbouring_bases(state):
        candidate = pointwise_best_strategy(game, neighbour_val, alpha, keep=strategy)
        value = objective_value(game, neighbour_val, candidate, alpha)
        if value < current:
            return NonLocalStep(candidate, neighbour_basis, neighbour_val, value)
    return None


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


class ObjectiveImprovementSolver:
    """Mutable state of one solve; use ``solve()`` for the functional entry point."""

    def __init__(self, game: Game, config: SolverConfig):
        self.original = game
        self.config = config
        self.game = game
        self.system = build_inequations(game)
        self.alpha: Optional[OffsetFactors] = None
        self.alpha_draw = 0
        self.noise_draw: Optional[int] = None
        self.epsilon = Fraction(0)
        self.resamples = 0
        self.alpha_tries = 0
        self.trace: List[IterationRecord] = []
        self.lp_solves = 0
        self.pivots = 0
        self.cap = config.iteration_cap(game.n_edges)

    # -- bookkeeping --------------------------------------------------------

    def _record(self, kind, before, after, plain, biased, basis, val, pivots) -> None:
        record = IterationRecord(len(self.trace), kind, before, after, plain, biased, basis, val, pivots)
        self.trace.append(record)
        Log.info(
            f"[Solver] #{record.index} {kind.value} f={format_rational(plain)} "
            f"biased={format_rational(biased)} pivots={pivots}"
        )

    def _report(self) -> ConditioningReport:
        return ConditioningReport(
            contraction=contraction(self.original),
            gap_lower_bound=gap_lower_bound(self.original),
            epsilon=self.epsilon,
            noise_seed=self.config.seed if self.noise_draw is not None else None,
            noise_draw=self.noise_draw or 0,
            alpha_seed=self.config.seed if self.alpha is not None else None,
            alpha_draw=self.alpha_draw,
            resamples=self.resamples,
        )

    # -- conditioning -------------------------------------------------------

    def _count_resample(self) -> None:
        self.resamples += 1
        if self.resamples > self.config.max_resamples:
            raise ConditioningError(f"resample limit of {self.config.max_resamples} exceeded")

    def _resample_alpha(self) -> None:
        self.alpha_draw = self.alpha_draw + 1 if self.alpha is not None else 0
        self.alpha = sample_offset_factors(self.original, self.config.seed, self.alpha_draw)
        self.alpha_tries += 1
        Log.info(f"[Conditioning] Offset factors resampled (draw {self.alpha_draw})")

    def _apply_noise(self) -> None:
        self.noise_draw = 0 if self.noise_draw is None else self.noise_draw + 1
        self.epsilon = noise_bound(self.original)
        self.game = perturb_weights(self.original, self.epsilon, self.config.seed, draw=self.noise_draw)
        self.system = build_inequations(self.game)
        self.alpha_tries = 0
        Log.info(
            f"[Conditioning] Weight noise applied (draw {self.noise_draw}, epsilon {format_rational(self.epsilon)})"
        )

    # -- LP -----------------------------------------------------------------

    def _start_state(self, strategy: JointStrategy, warm: Optional[Basis]) -> SimplexState:
        state = None
        if warm is not None:
            state = SimplexState.from_basis(self.system, warm, strategy, self.alpha)
        if state is None:
            state = SimplexState.feasible_start(self.system, strategy, self.alpha)
        return state

    def _mixed_descent(self, strategy: JointStrategy, warm: Optional[Basis]):
        """
        Simplex pivots interleaved with local strategy updates at every visited valuation.

        Returns:
            (final strategy, optimal state)
        """
        state = self._start_state(strategy, warm)
        limit = 1000 + 50 * (len(self.system) + self.system.n_vertices)
        steps = 0
        while True:
            val = state.valuation
            improved = local_improvements(self.game, val, strategy, self.alpha)
            if improved is not None:
                self._record(
                    IterationKind.LOCAL,
                    strategy,
                    improved,
                    objective_value(self.game, val, strategy),
                    objective_value(self.game, val, strategy, self.alpha),
                    state.basis,
                    val,
                    state.pivots,
                )
                strategy = improved
                state.set_objective(strategy, self.alpha)
                continue
            if not state.pivot():
                return strategy, state
            steps += 1
            if steps > limit:
                raise LPIterationLimitError(f"mixed descent exceeded {limit} pivots")

    # -- main loop ----------------------------------------------------------

    def run(self) -> Solution:
        config = self.config
        strategy = choose_initial_strategies(
            self.original, config.seed if config.randomize_initial_strategy else None
        )
        if config.use_offset_factors:
            self.alpha = sample_offset_factors(self.original, config.seed, 0)
        if config.noise_policy == NoisePolicy.ALWAYS:
            self._apply_noise()

        warm: Optional[Basis] = None
        while True:
            if self.lp_solves >= self.cap:
                raise IterationLimitExceeded(f"iteration limit of {self.cap} LP solves exceeded", self.trace)

            if config.pivot_mode == PivotMode.MIXED:
                strategy, state = self._mixed_descent(strategy, warm)
            else:
                state = solve_lp(self.system, strategy, self.alpha, warm_start=warm).state
            self.lp_solves += 1
            self.pivots += state.pivots
            val, basis = state.valuation, state.basis
            optimum = state.objective_value()
            plain = objective_value(self.game, val, strategy)

            if optimum == 0:
                self._record(IterationKind.TERMINAL, strategy, strategy, plain, optimum, basis, val, state.pivots)
                break

            defined = strategies_defined_by(self.game, val)
            if defined is not None:
                self._record(IterationKind.LOCAL, strategy, defined, plain, optimum, basis, val, state.pivots)
                strategy = defined
                self._record(IterationKind.TERMINAL, strategy, strategy, Fraction(0), Fraction(0), basis, val, 0)
                break

            if config.noise_policy != NoisePolicy.NEVER and detect_degeneracy(state):
                Log.warning(f"[Solver] Degenerate valuation at basis {basis.edges}, reconditioning with noise")
                self._count_resample()
                self._apply_noise()
                self._record(IterationKind.RECONDITION, strategy, strategy, plain, optimum, basis, val, state.pivots)
                warm = None
                continue

            improved = local_improvements(self.game, val, strategy, self.alpha)
            if improved is not None:
                self._record(IterationKind.LOCAL, strategy, improved, plain, optimum, basis, val, state.pivots)
                strategy = improved
                warm = basis
                continue

            step = non_local_improvement(self.game, self.system, val, basis, strategy, self.alpha)
            if step is not None:
                self._record(IterationKind.NONLOCAL, strategy, step.strategy, plain, optimum, basis, val, state.pivots)
                strategy = step.strategy
                warm = step.basis
                continue

            Log.warning(f"[Solver] No improvement found at basis {basis.edges}, reconditioning")
            self._count_resample()
            if config.noise_policy == NoisePolicy.NEVER or self.alpha_tries == 0:
                self._resample_alpha()
                warm = basis
            else:
                self._apply_noise()
                warm = None
            self._record(IterationKind.RECONDITION, strategy, strategy, plain, optimum, basis, val, state.pivots)

        if self.noise_draw is not None:
            val = recover_exact_solution(self.original, strategy)
        elif not verify_solution(self.original, val):
            raise SolverError("final valuation fails verification")

        Log.info(f"[Solver] Solved in {self.lp_solves} LP solves, {self.pivots} pivots")
        return Solution(val, strategy, self.trace, self._report(), self.lp_solves, self.pivots)


def solve(game: Game, config: Optional[SolverConfig] = None) -> Solution:
    """
    Solve a discounted payoff game exactly.

    Args:
        game: a valid game
        config: solver knobs, defaults to SolverConfig()

    Returns:
        Solution with the game valuation and co-optimal joint strategy

    Raises:
        InvalidGameError: if the game violates an invariant
        IterationLimitExceeded: after config.iteration_cap LP solves
        ConditioningError: when reconditioning gives up
    """
    violations = validate_game(game)
    if violations:
        raise InvalidGameError(violations)
    return ObjectiveImprovementSolver(game, config or SolverConfig()).run()


def format_trace(game: Game, trace: List[IterationRecord], level: TraceLevel = TraceLevel.SUMMARY) -> str:
    """Tabular rendering of a trace; FULL adds strategies and valuations."""
    if level == TraceLevel.NONE:
        return ""
    headers = ["#", "kind", "f", "pivots", "basis"]
    if level == TraceLevel.FULL:
        headers += ["biased f", "strategy", "valuation"]
    rows = []
    for r in trace:
        row = [r.index, r.kind.value, format_rational(r.optimum), r.pivots, " ".join(map(str, r.basis.edges))]
        if level == TraceLevel.FULL:
            row += [format_rational(r.biased_optimum), r.strategy_after.describe(game), r.valuation.describe(game)]
        rows.append(row)
    return tabulate(rows, headers=headers, tablefmt="simple")
