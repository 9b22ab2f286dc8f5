"""
The inequation system of a game and the quantities defined on it.

Every edge e = (v, v') contributes one inequation

    MAX source:  val(v) >= w_e + λ_e val(v')
    MIN source:  val(v) <= w_e + λ_e val(v')

The system never changes during a solve. Internally each inequation is also
kept in the uniform form ``a_e · val <= b_e`` (MAX rows negated), chosen so
that the slack ``b_e - a_e · val`` is exactly the edge's offset.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import exact_linalg
from .game_core import Game, JointStrategy, Owner, Valuation, format_rational


class Direction(str, Enum):
    GEQ = "GEQ"  # maximiser source
    LEQ = "LEQ"  # minimiser source


@dataclass(frozen=True)
class Inequation:
    edge: int
    direction: Direction
    src: int
    dst: int
    weight: Fraction
    discount: Fraction

    def form(self, val: Sequence[Fraction]) -> Fraction:
        """The affine form val(src) - λ val(dst) - w."""
        return val[self.src] - self.discount * val[self.dst] - self.weight

    def offset(self, val: Sequence[Fraction]) -> Fraction:
        value = self.form(val)
        return value if self.direction == Direction.GEQ else -value

    def holds(self, val: Sequence[Fraction]) -> bool:
        return self.offset(val) >= 0

    def row(self, n_vertices: int) -> Tuple[List[Fraction], Fraction]:
        """(a, b) with a · val <= b equivalent to this inequation."""
        a = [Fraction(0)] * n_vertices
        a[self.src] += 1
        a[self.dst] -= self.discount
        b = self.weight
        if self.direction == Direction.GEQ:
            a = [-x for x in a]
            b = -b
        return a, b

    def render(self, game: Game) -> str:
        op = ">=" if self.direction == Direction.GEQ else "<="
        rhs = []
        if self.weight != 0 or self.discount == 0:
            rhs.append(format_rational(self.weight))
        if self.discount != 0:
            rhs.append(f"{format_rational(self.discount)} val({game.label(self.dst)})")
        return f"val({game.label(self.src)}) {op} {' + '.join(rhs)}"


@dataclass(frozen=True, eq=False)
class InequationSystem:
    """One inequation per edge, indexed by edge id, plus the stacked (A, b) form."""

    game: Game
    inequations: Tuple[Inequation, ...]
    A: np.ndarray
    b: np.ndarray

    def __len__(self) -> int:
        return len(self.inequations)

    def __iter__(self) -> Iterator[Inequation]:
        return iter(self.inequations)

    def __getitem__(self, e: int) -> Inequation:
        return self.inequations[e]

    @property
    def n_vertices(self) -> int:
        return self.game.n_vertices

    def slack(self, e: int, x: Sequence[Fraction]) -> Fraction:
        return self.b[e] - exact_linalg.dot(self.A[e], x)


@dataclass(frozen=True)
class Basis:
    """Edge ids whose inequations are imposed as equations, kept sorted."""

    edges: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @classmethod
    def of(cls, edges: Iterable[int]) -> "Basis":
        return cls(tuple(edges))

    def __contains__(self, e: int) -> bool:
        return e in self.edges

    def __iter__(self):
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class OffsetFactors:
    """Positive per-edge multipliers on offsets."""

    factors: Tuple[Fraction, ...]

    def __post_init__(self):
        factors = tuple(Fraction(a) for a in self.factors)
        if any(a <= 0 for a in factors):
            raise ValueError("offset factors must be positive")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def uniform(cls, game: Game) -> "OffsetFactors":
        return cls(tuple(Fraction(1) for _ in game.edges))

    def __getitem__(self, e: int) -> Fraction:
        return self.factors[e]


@dataclass(frozen=True)
class SolutionWitness:
    """Why a valuation is (not) the game valuation."""

    ok: bool
    strategy: Optional[JointStrategy] = None
    violated_edge: Optional[int] = None
    vertex_without_sharp_edge: Optional[int] = None

    def describe(self, system: "InequationSystem") -> str:
        game = system.game
        if self.ok:
            edges = ", ".join(f"e{e}: {system[e].render(game)}" for e in self.strategy.edges)
            return f"sharp edges: {edges}"
        if self.violated_edge is not None:
            return f"inequation for edge {self.violated_edge} violated: {system[self.violated_edge].render(game)}"
        return f"vertex {game.label(self.vertex_without_sharp_edge)} has no sharp outgoing edge"


def build_inequations(game: Game) -> InequationSystem:
    n = game.n_vertices
    inequations = []
    rows = []
    rhs = []
    for e in game.edges:
        direction = Direction.GEQ if game.owner(e.src) == Owner.MAX else Direction.LEQ
        inequation = Inequation(e.id, direction, e.src, e.dst, e.weight, e.discount)
        a, b = inequation.row(n)
        inequations.append(inequation)
        rows.append(a)
        rhs.append(b)
    A = exact_linalg.zeros((len(rows), n))
    for i, row in enumerate(rows):
        A[i, :] = row
    b = np.array(rhs, dtype=object) if rhs else exact_linalg.zeros(0)
    return InequationSystem(game, tuple(inequations), A, b)


def _inequation(game: Game, e: int) -> Inequation:
    edge = game.edges[e]
    direction = Direction.GEQ if game.owner(edge.src) == Owner.MAX else Direction.LEQ
    return Inequation(e, direction, edge.src, edge.dst, edge.weight, edge.discount)


def offset(game: Game, val: Valuation, e: int) -> Fraction:
    """Offset of edge e at val; negative when the inequation is violated."""
    return _inequation(game, e).offset(val)


def biased_offset(game: Game, val: Valuation, e: int, alpha: OffsetFactors) -> Fraction:
    return alpha[e] * offset(game, val, e)


def objective_value(
    game: Game, val: Valuation, strategy: JointStrategy, alpha: Optional[OffsetFactors] = None
) -> Fraction:
    """Sum over vertices of the (biased) offset of the strategy's edge."""
    total = Fraction(0)
    for e in strategy.edges:
        total += offset(game, val, e) if alpha is None else biased_offset(game, val, e, alpha)
    return total


def objective_form(
    system: InequationSystem, strategy: JointStrategy, alpha: Optional[OffsetFactors] = None
) -> Tuple[np.ndarray, Fraction]:
    """
    The objective as c · val + constant.

    With slack_e = b_e - a_e · val the objective is
    sum_v α_e b_e - (sum_v α_e a_e) · val for e = σ(v).

    Returns:
        (c, constant)
    """
    n = system.n_vertices
    c = exact_linalg.zeros(n)
    constant = Fraction(0)
    for e in strategy.edges:
        factor = Fraction(1) if alpha is None else alpha[e]
        c = c - factor * system.A[e]
        constant += factor * system.b[e]
    return c, constant


def basis_valuation(system: InequationSystem, basis: Basis) -> Optional[Valuation]:
    """
    Impose the basis inequations as equations and solve.

    Returns:
        the unique solution, or None when the basis is singular
    """
    n = system.n_vertices
    if len(basis) != n:
        return None
    matrix = exact_linalg.zeros((n, n))
    for i, e in enumerate(basis):
        matrix[i, :] = system.A[e]
    solution = exact_linalg.solve(matrix, [system.b[e] for e in basis])
    if solution is None:
        return None
    return Valuation(tuple(solution))


def first_violated_inequation(system: InequationSystem, val: Valuation) -> Optional[int]:
    for inequation in system:
        if not inequation.holds(val):
            return inequation.edge
    return None


def is_feasible(system: InequationSystem, val: Valuation) -> bool:
    return first_violated_inequation(system, val) is None


def sharp_edges(game: Game, val: Valuation) -> FrozenSet[int]:
    return frozenset(e.id for e in game.edges if offset(game, val, e.id) == 0)


def strategies_defined_by(game: Game, val: Valuation) -> Optional[JointStrategy]:
    """A sharp outgoing edge per vertex (lowest id), or None if some vertex has none."""
    chosen = []
    for out in game.out_edges:
        sharp = next((e for e in out if offset(game, val, e) == 0), None)
        if sharp is None:
            return None
        chosen.append(sharp)
    return JointStrategy(tuple(chosen))


def solution_witness(game: Game, val: Valuation, system: Optional[InequationSystem] = None) -> SolutionWitness:
    system = system if system is not None else build_inequations(game)
    violated = first_violated_inequation(system, val)
    if violated is not None:
        return SolutionWitness(False, violated_edge=violated)
    strategy = strategies_defined_by(game, val)
    if strategy is None:
        lacking = next(
            v for v, out in enumerate(game.out_edges) if all(offset(game, val, e) != 0 for e in out)
        )
        return SolutionWitness(False, vertex_without_sharp_edge=lacking)
    return SolutionWitness(True, strategy=strategy)


def verify_solution(game: Game, val: Valuation) -> bool:
    """True iff val is feasible and defines strategies, i.e. val is the game's valuation."""
    if len(val) != game.n_vertices:
        return False
    return solution_witness(game, val).ok
