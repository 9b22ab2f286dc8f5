"""
Exact active-set simplex over an inequation system.

The LP is ``min c · val`` subject to ``A val <= b`` in the |V|-dimensional
valuation space. A vertex of the polytope is described by a basis: |V| rows
imposed as equations. The engine keeps the exact inverse of the basis matrix
and updates it with a rank-one exchange per pivot.

Pivoting follows Bland's rule: the basic row with the lowest edge id among
those with a negative multiplier is relaxed, and the blocking row with the
lowest edge id among ratio-test ties enters.

A first feasible basis is found by a phase-1 LP in (val, t) space where every
row is relaxed by t >= 0. The start point val = 0, t = max violation is
crashed to a vertex, t is minimised to 0, and finally the row t >= 0 is
exchanged out of the basis.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import exact_linalg
from .constraints import Basis, InequationSystem, OffsetFactors, objective_form
from .game_core import JointStrategy, Valuation
from .pylogger import Log


class LPEngineError(RuntimeError):
    """Internal inconsistency of the simplex engine."""


class LPIterationLimitError(LPEngineError):
    pass


class Phase(str, Enum):
    PHASE1 = "PHASE1"
    PHASE2 = "PHASE2"


def default_pivot_limit(system: InequationSystem) -> int:
    return 1000 + 50 * (len(system) + system.n_vertices)


class SimplexState:
    """
    Single-owner mutable simplex state.

    Rows are indexed by edge id. In phase 1 one extra row (index |E|) encodes
    t >= 0 and the last coordinate of the point is t.
    """

    def __init__(
        self,
        system: InequationSystem,
        A: np.ndarray,
        b: np.ndarray,
        rows: Sequence[int],
        Binv: np.ndarray,
        x: np.ndarray,
        c: np.ndarray,
        constant: Fraction,
        phase: Phase,
    ):
        self.system = system
        self.phase = phase
        self.pivots = 0
        self._A = A
        self._b = b
        self._rows = list(rows)
        self._Binv = Binv
        self._x = x
        self._c = c
        self._constant = constant

    # -- construction -------------------------------------------------------

    @classmethod
    def from_basis(
        cls,
        system: InequationSystem,
        basis: Basis,
        strategy: JointStrategy,
        alpha: Optional[OffsetFactors] = None,
    ) -> Optional["SimplexState"]:
        """
        Phase-2 state at a given basis.

        Returns:
            the state, or None if the basis is singular or infeasible
        """
        rows = list(basis)
        if len(rows) != system.n_vertices:
            return None
        Binv = exact_linalg.inverse(system.A[rows])
        if Binv is None:
            return None
        x = Binv.dot(system.b[rows])
        slacks = system.b - system.A.dot(x)
        if any(s < 0 for s in slacks):
            return None
        c, constant = objective_form(system, strategy, alpha)
        return cls(system, system.A, system.b, rows, Binv, x, c, constant, Phase.PHASE2)

    @classmethod
    def feasible_start(
        cls,
        system: InequationSystem,
        strategy: JointStrategy,
        alpha: Optional[OffsetFactors] = None,
        max_pivots: Optional[int] = None,
    ) -> "SimplexState":
        """Run phase 1 and return a phase-2 state at a feasible basis of the system."""
        n, m = system.n_vertices, len(system)
        dim = n + 1

        A1 = exact_linalg.zeros((m + 1, dim))
        A1[:m, :n] = system.A
        A1[:, n] = Fraction(-1)
        b1 = exact_linalg.zeros(m + 1)
        b1[:m] = system.b
        c1 = exact_linalg.zeros(dim)
        c1[n] = Fraction(1)

        x = exact_linalg.zeros(dim)
        x[n] = max([Fraction(0)] + [-b for b in system.b])
        rows = _crash_to_vertex(A1, b1, c1, x)
        Binv = exact_linalg.inverse(A1[rows])
        if Binv is None:
            raise LPEngineError("phase-1 crash produced a singular basis")

        relaxed = cls(system, A1, b1, rows, Binv, x, c1, Fraction(0), Phase.PHASE1)
        relaxed.run(max_pivots)
        if relaxed._x[n] != 0:
            raise LPEngineError(f"inequation system infeasible (phase-1 optimum t = {relaxed._x[n]})")

        t_row = m
        if t_row not in relaxed._rows:
            # A_B^T u = r_t with r_t = (0, ..., 0, -1); any basic row with u != 0 can leave
            u = [-relaxed._Binv[n, i] for i in range(dim)]
            candidates = sorted((relaxed._rows[i], i) for i in range(dim) if u[i] != 0)
            if not candidates:
                raise LPEngineError("row t >= 0 cannot enter the phase-1 basis")
            relaxed._rows[candidates[0][1]] = t_row

        rows = [r for r in relaxed._rows if r != t_row]
        Binv = exact_linalg.inverse(system.A[rows])
        if Binv is None:
            raise LPEngineError("phase-1 basis does not restrict to a basis of the system")
        c, constant = objective_form(system, strategy, alpha)
        state = cls(system, system.A, system.b, rows, Binv, Binv.dot(system.b[rows]), c, constant, Phase.PHASE2)
        state.pivots = relaxed.pivots
        Log.debug(f"[SimplexState] Phase 1 finished after {relaxed.pivots} pivots, basis {state.basis.edges}")
        return state

    # -- queries ------------------------------------------------------------

    @property
    def basis(self) -> Basis:
        return Basis(tuple(self._rows))

    @property
    def valuation(self) -> Valuation:
        return Valuation(tuple(self._x[: self.system.n_vertices]))

    def objective_value(self) -> Fraction:
        return exact_linalg.dot(self._c, self._x) + self._constant

    def multipliers(self) -> List[Fraction]:
        """μ with A_B^T μ = -c, ordered like the basis rows."""
        return list(-self._c.dot(self._Binv))

    def is_optimal(self) -> bool:
        return all(mu >= 0 for mu in self.multipliers())

    def set_objective(self, strategy: JointStrategy, alpha: Optional[OffsetFactors] = None) -> None:
        if self.phase != Phase.PHASE2:
            raise LPEngineError("objective can only be replaced in phase 2")
        self._c, self._constant = objective_form(self.system, strategy, alpha)

    # -- pivoting -----------------------------------------------------------

    def _ratio_test(self, d: np.ndarray) -> Optional[Tuple[Fraction, int]]:
        """Smallest step along d before a non-basic row becomes tight; lowest row id on ties."""
        in_basis = set(self._rows)
        rates = self._A.dot(d)
        best: Optional[Tuple[Fraction, int]] = None
        for j, rate in enumerate(rates):
            if j in in_basis or rate <= 0:
                continue
            step = (self._b[j] - exact_linalg.dot(self._A[j], self._x)) / rate
            if best is None or step < best[0]:
                best = (step, j)
        return best

    def _exchange(self, i: int, j: int, step: Fraction, d: np.ndarray) -> None:
        """Replace basic row at position i by row j (rank-one update of the inverse)."""
        col = np.array(self._Binv[:, i], dtype=object)
        w = self._A[j].dot(self._Binv)
        w[i] -= 1
        denom = exact_linalg.dot(self._A[j], col)
        self._Binv = self._Binv - np.outer(col, w) / denom
        self._x = self._x + step * d
        self._rows[i] = j
        self.pivots += 1

    def pivot(self) -> bool:
        """
        One Bland pivot.

        Returns:
            False if the state is already optimal
        """
        mu = self.multipliers()
        leaving = [(self._rows[i], i) for i in range(len(self._rows)) if mu[i] < 0]
        if not leaving:
            return False
        k, i = min(leaving)
        d = -np.array(self._Binv[:, i], dtype=object)
        block = self._ratio_test(d)
        if block is None:
            raise LPEngineError(f"objective unbounded below when relaxing row {k}")
        step, j = block
        self._exchange(i, j, step, d)
        Log.debug(f"[SimplexState] {self.phase.value} pivot {self.pivots}: row {k} leaves, row {j} enters, step {step}")
        return True

    def run(self, max_pivots: Optional[int] = None) -> None:
        limit = max_pivots if max_pivots is not None else default_pivot_limit(self.system)
        start = self.pivots
        while self.pivot():
            if self.pivots - start > limit:
                raise LPIterationLimitError(f"simplex exceeded {limit} pivots")

    # -- neighbourhood ------------------------------------------------------

    def neighbours(self) -> List[Tuple[Basis, Valuation]]:
        """
        Feasible bases one exchange away, by relaxing each basic row in turn.

        Unbounded directions are skipped. Sorted by entering row, then leaving row.
        """
        if self.phase != Phase.PHASE2:
            raise LPEngineError("neighbours are only defined in phase 2")
        found = []
        for i, k in enumerate(self._rows):
            d = -np.array(self._Binv[:, i], dtype=object)
            block = self._ratio_test(d)
            if block is None:
                continue
            step, j = block
            rows = list(self._rows)
            rows[i] = j
            x = self._x + step * d
            found.append((j, k, Basis(tuple(rows)), Valuation(tuple(x))))
        found.sort(key=lambda item: (item[0], item[1]))
        return [(basis, val) for _, _, basis, val in found]

    def tight_rows(self) -> List[int]:
        slacks = self.system.b - self.system.A.dot(self._x[: self.system.n_vertices])
        return [e for e, s in enumerate(slacks) if s == 0]


def _crash_to_vertex(A: np.ndarray, b: np.ndarray, c: np.ndarray, x: np.ndarray) -> List[int]:
    """
    Move the feasible point x (in place) to a vertex without increasing c · x.

    Each step follows a direction in the null space of the current tight set
    until a new row blocks; that row joins the tight set.

    Returns:
        the rows of the reached vertex, in the order they became tight
    """
    dim = A.shape[1]
    tight: List[int] = []
    while len(tight) < dim:
        d = exact_linalg.null_vector(A[tight], dim)
        if d is None:
            raise LPEngineError("crash: tight rows are dependent")
        if exact_linalg.dot(c, d) > 0:
            d = -d
        block = _block(A, b, x, d, tight)
        if block is None:
            if exact_linalg.dot(c, d) < 0:
                raise LPEngineError("crash: phase-1 objective unbounded")
            d = -d
            block = _block(A, b, x, d, tight)
            if block is None:
                raise LPEngineError("crash: polyhedron contains a line")
        step, j = block
        x[:] = x + step * d
        tight.append(j)
    return tight


def _block(A: np.ndarray, b: np.ndarray, x: np.ndarray, d: np.ndarray, exclude: Sequence[int]):
    excluded = set(exclude)
    best = None
    for j in range(A.shape[0]):
        if j in excluded:
            continue
        rate = exact_linalg.dot(A[j], d)
        if rate <= 0:
            continue
        step = (b[j] - exact_linalg.dot(A[j], x)) / rate
        if best is None or step < best[0]:
            best = (step, j)
    return best


@dataclass
class LPSolution:
    valuation: Valuation
    basis: Basis
    optimum: Fraction
    pivots: int
    state: SimplexState

    def __iter__(self):
        return iter((self.valuation, self.basis))


def solve_lp(
    system: InequationSystem,
    strategy: JointStrategy,
    alpha: Optional[OffsetFactors] = None,
    warm_start: Optional[Basis] = None,
    max_pivots: Optional[int] = None,
) -> LPSolution:
    """
    Minimise the (biased) strategy objective over the inequation system.

    Args:
        system: inequation system of the game
        strategy: joint strategy selecting the objective's edges
        alpha: offset factors, None for the plain objective
        warm_start: a basis to start phase 2 from; phase 1 runs if it is
            singular or infeasible
        max_pivots: pivot cap, default grows with the system size

    Returns:
        LPSolution with the optimal basis valuation

    Raises:
        LPIterationLimitError: if the pivot cap is exceeded
    """
    state = None
    if warm_start is not None:
        state = SimplexState.from_basis(system, warm_start, strategy, alpha)
        if state is None:
            Log.warning(f"[SimplexState] Warm-start basis {warm_start.edges} unusable, running phase 1")
    if state is None:
        state = SimplexState.feasible_start(system, strategy, alpha, max_pivots)
    state.run(max_pivots)
    optimum = state.objective_value()
    if optimum < 0:
        raise LPEngineError(f"negative optimum {optimum} on a feasible basis")
    return LPSolution(state.valuation, state.basis, optimum, state.pivots, state)


def neighbouring_bases(state: SimplexState) -> List[Tuple[Basis, Valuation]]:
    return state.neighbours()


def detect_degeneracy(state: SimplexState) -> bool:
    """True iff more than |V| inequations are tight at the state's valuation."""
    return len(state.tight_rows()) > state.system.n_vertices
