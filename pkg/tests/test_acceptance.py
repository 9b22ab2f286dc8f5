"""
Randomized end-to-end sweeps against the oracles. Run with ``pytest -m slow``.
"""

from fractions import Fraction

import numpy as np
import pytest

from objimprove.lib.conditioning import gap_lower_bound, noise_bound, perturb_weights, recover_exact_solution, true_gap
from objimprove.lib.constraints import objective_value, verify_solution
from objimprove.lib.game_core import JointStrategy, generate_random_game, joint_strategy_valuation, lasso_of, lasso_value
from objimprove.lib.improvement import IterationKind, solve
from objimprove.lib.oracles import brute_force_solve, value_iteration
from objimprove.lib.solver_config import PivotMode, SolverConfig
from tests.conftest import DISCOUNT_POOL

pytestmark = pytest.mark.slow

TOLERANCE = Fraction(1, 10**6)


def sweep_game(seed: int, max_vertices: int = 6, max_degree: int = 3):
    rng = np.random.default_rng([0xACCE, seed])
    n = int(rng.integers(1, max_vertices + 1))
    degree = int(rng.integers(1, max_degree + 1))
    return generate_random_game(n, degree, 4, DISCOUNT_POOL, seed)


def assert_descending(trace):
    previous = None
    for record in trace:
        if record.kind == IterationKind.RECONDITION:
            previous = None
            continue
        assert record.optimum >= 0
        assert record.biased_optimum >= 0
        if record.kind == IterationKind.TERMINAL:
            assert record.optimum == 0
        else:
            if previous is not None:
                assert record.biased_optimum < previous
            previous = record.biased_optimum
    assert trace[-1].kind == IterationKind.TERMINAL


@pytest.mark.parametrize("seed", range(200))
def test_solve_equals_brute_force(seed):
    game = sweep_game(seed)
    expected, _ = brute_force_solve(game)
    lp_first = solve(game, SolverConfig(seed=seed))
    mixed = solve(game, SolverConfig(seed=seed, pivot_mode=PivotMode.MIXED))
    assert lp_first.valuation == expected
    assert mixed.valuation == expected
    assert objective_value(game, lp_first.valuation, lp_first.strategies) == 0
    assert_descending(lp_first.trace)
    assert_descending(mixed.trace)


@pytest.mark.parametrize("seed", range(50))
def test_solve_within_value_iteration_tolerance(seed):
    rng = np.random.default_rng([0x0F1, seed])
    n_vertices = 20 if seed % 5 == 0 else int(rng.integers(2, 21))
    game = generate_random_game(n_vertices, int(rng.integers(1, 4)), 4, DISCOUNT_POOL, seed)
    solution = solve(game, SolverConfig(seed=seed))
    approx = value_iteration(game, TOLERANCE)
    assert verify_solution(game, solution.valuation)
    assert max(abs(x - y) for x, y in zip(solution.valuation, approx)) <= TOLERANCE
    assert_descending(solution.trace)


@pytest.mark.parametrize("seed", range(50))
def test_perturbed_co_optimal_strategies_transfer(seed):
    game = sweep_game(seed + 1000, max_vertices=5)
    perturbed = perturb_weights(game, noise_bound(game), seed)
    expected, original_strategies = brute_force_solve(game)
    _, perturbed_strategies = brute_force_solve(perturbed)
    for strategy in perturbed_strategies:
        assert strategy in original_strategies
        assert recover_exact_solution(game, strategy) == expected
    gap = true_gap(game)
    if gap is not None:
        assert gap_lower_bound(game) <= gap


@pytest.mark.parametrize("seed", range(50))
def test_offset_factor_invariance(seed):
    game = sweep_game(seed + 2000)
    plain = solve(game, SolverConfig(use_offset_factors=False)).valuation
    for alpha_seed in range(3):
        assert solve(game, SolverConfig(seed=alpha_seed)).valuation == plain


def test_strategy_valuation_equals_lasso_value():
    rng = np.random.default_rng(0x1A55)
    for pair in range(1000):
        game = sweep_game(3000 + pair % 100)
        strategy = JointStrategy(tuple(out[int(rng.integers(0, len(out)))] for out in game.out_edges))
        val = joint_strategy_valuation(game, strategy)
        assert all(val[v] == lasso_value(game, lasso_of(game, strategy, v)) for v in range(game.n_vertices))
