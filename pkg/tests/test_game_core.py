from fractions import Fraction

import numpy as np
import pytest

from objimprove.lib.game_core import (
    Edge,
    Game,
    GameFormatError,
    InvalidGameError,
    JointStrategy,
    Owner,
    StrategyCapExceeded,
    Valuation,
    all_joint_strategies,
    check_strategy_cap,
    format_rational,
    generate_random_game,
    joint_strategy_valuation,
    lasso_of,
    lasso_value,
    lowest_edge_strategy,
    parse_game,
    parse_rational,
    serialize_game,
    validate_game,
)
from tests.conftest import DISCOUNT_POOL, E_AA, E_BA, E_BB, random_game


def _replace_edge(game: Game, e: int, **changes) -> Game:
    edges = list(game.edges)
    old = edges[e]
    edges[e] = Edge(
        old.id,
        changes.get("src", old.src),
        changes.get("dst", old.dst),
        changes.get("weight", old.weight),
        changes.get("discount", old.discount),
    )
    return Game(game.vertices, tuple(edges))


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == -2
    assert parse_rational("4/8") == Fraction(1, 2)


@pytest.mark.parametrize("token, message", [("1/0", "zero denominator"), ("1.5", "malformed"), ("a/2", "malformed")])
def test_parse_rational_errors(token, message):
    with pytest.raises(ValueError, match=message):
        parse_rational(token)


def test_format_rational_always_has_denominator():
    assert format_rational(2) == "2/1"
    assert format_rational(Fraction(-4, 6)) == "-2/3"


# ---------------------------------------------------------------------------
# Parsing and validation
# ---------------------------------------------------------------------------


def test_parse_g1(g1):
    assert g1.n_vertices == 2
    assert g1.n_edges == 3
    assert g1.owner(0) == Owner.MIN
    assert g1.owner(1) == Owner.MAX
    assert [g1.label(v) for v in range(2)] == ["a", "b"]
    assert g1.edges[E_AA] == Edge(E_AA, 0, 0, Fraction(1), Fraction(1, 2))
    assert g1.out_edges == ((E_AA,), (E_BB, E_BA))


def test_validate_g1(g1):
    assert validate_game(g1) == []


def test_validate_reports_sink(g1):
    game = g1.restrict([E_BB, E_BA])
    assert "vertex a has no outgoing edge" in validate_game(game)


def test_validate_reports_discount_out_of_range(g1):
    game = _replace_edge(g1, E_BB, discount=Fraction(1))
    violations = validate_game(game)
    assert len(violations) == 1
    assert "discount 1/1 not in [0,1)" in violations[0]


def test_parse_rejects_invalid_game_when_validating():
    text = "dpg 2\nvertex 0 MIN\nvertex 1 MAX\nedge 0 1 0 1/2\n"
    with pytest.raises(InvalidGameError) as info:
        parse_game(text)
    assert info.value.violations == ["vertex 1 has no outgoing edge"]
    assert parse_game(text, validate=False).n_edges == 1


@pytest.mark.parametrize(
    "text, line, message",
    [
        ("dpg 1\nvertex 0 MIN\nedge 0 1 1/0 1/2\n", 3, "endpoint 1 out of range"),
        ("dpg 2\nvertex 0 MIN\nvertex 1 MAX\nedge 0 1 1/0 1/2\n", 4, "zero denominator"),
        ("vertex 0 MIN\n", 1, "missing 'dpg"),
        ("dpg 1\ndpg 1\n", 2, "duplicate 'dpg' header"),
        ("dpg 1\nvertex 0 MIN\nvertex 0 MAX\n", 3, "duplicate vertex id 0"),
        ("dpg 1\nvertex 0 EVE\n", 2, "unknown owner"),
        ("dpg 2\nvertex 0 MIN a\nvertex 1 MAX a\n", 3, "duplicate vertex name 'a'"),
        ("dpg 2\nvertex 0 MIN 1\nvertex 1 MAX\n", 2, "vertex name '1' is numeric"),
        ("dpg 1\nvertex 0 MIN\nedge 0 0 1\n", 3, "expected 'edge"),
        ("dpg 1\nvertex 0 MIN\nnode 0\n", 3, "unknown keyword"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, message):
    with pytest.raises(GameFormatError, match=message) as info:
        parse_game(text)
    assert info.value.line_number == line
    assert str(info.value).startswith(f"line {line}: ")


def test_parse_reports_undeclared_vertex():
    with pytest.raises(GameFormatError, match="vertex 1 not declared"):
        parse_game("dpg 2\nvertex 0 MIN\n")


def test_parse_ignores_comments_and_blank_lines():
    text = "# header\n\ndpg 1  # one vertex\nvertex 0 max v\n  edge 0 0 2 0\n"
    game = parse_game(text)
    assert game.owner(0) == Owner.MAX
    assert game.edges[0].discount == 0


def test_serialize_is_canonical(g1):
    text = serialize_game(g1)
    assert text == (
        "dpg 2\n"
        "vertex 0 MIN a\n"
        "vertex 1 MAX b\n"
        "edge 0 0 1/1 1/2\n"
        "edge 1 1 0/1 1/2\n"
        "edge 1 0 0/1 1/2\n"
    )
    assert parse_game(text) == g1


def test_serialize_normalizes_rationals():
    game = parse_game("dpg 1\nvertex 0 MIN\nedge 0 0 4/8 2/4\n")
    assert serialize_game(game).splitlines()[-1] == "edge 0 0 1/2 1/2"


@pytest.mark.parametrize("seed", range(10))
def test_random_games_survive_serialization(seed):
    game = random_game(seed)
    assert parse_game(serialize_game(game)) == game


# ---------------------------------------------------------------------------
# Strategies, lassos and valuations
# ---------------------------------------------------------------------------


def test_joint_strategy_from_successors(g1):
    strategy = JointStrategy.from_successors(g1, {0: 0, 1: 0})
    assert strategy.edges == (E_AA, E_BA)
    assert strategy.is_valid(g1)
    assert strategy.describe(g1) == "a->a, b->a"
    with pytest.raises(ValueError, match="is not an edge"):
        JointStrategy.from_successors(g1, {0: 1, 1: 0})


def test_strategy_validity(g1):
    assert not JointStrategy((E_BB, E_BA)).is_valid(g1)
    assert not JointStrategy((E_AA,)).is_valid(g1)


def test_lasso_of(g1):
    assert lasso_of(g1, JointStrategy((E_AA, E_BA)), 1).prefix == (E_BA,)
    assert lasso_of(g1, JointStrategy((E_AA, E_BA)), 1).cycle == (E_AA,)
    assert lasso_of(g1, JointStrategy((E_AA, E_BB)), 1).prefix == ()
    assert lasso_of(g1, JointStrategy((E_AA, E_BB)), 1).cycle == (E_BB,)
    for strategy in all_joint_strategies(g1):
        lasso = lasso_of(g1, strategy, 0)
        assert (lasso.prefix, lasso.cycle) == ((), (E_AA,))


def test_lasso_value(g1, g2):
    assert lasso_value(g1, lasso_of(g1, JointStrategy((E_AA, E_BA)), 0)) == 2
    assert lasso_value(g1, lasso_of(g1, JointStrategy((E_AA, E_BA)), 1)) == 1
    assert lasso_value(g2, lasso_of(g2, JointStrategy((E_AA, E_BA)), 1)) == 2


def test_joint_strategy_valuation(g1, g2):
    assert joint_strategy_valuation(g1, JointStrategy((E_AA, E_BA))) == Valuation.of(2, 1)
    assert joint_strategy_valuation(g1, JointStrategy((E_AA, E_BB))) == Valuation.of(2, 0)
    assert joint_strategy_valuation(g2, JointStrategy((E_AA, E_BB))) == Valuation.of(3, 0)


def test_valuation_helpers(g1):
    val = Valuation.of(2, Fraction(1, 2))
    assert val.as_dict(g1) == {"a": "2/1", "b": "1/2"}
    assert val.describe(g1) == "a = 2/1, b = 1/2"
    assert g1.vertex_by_label("b") == 1
    assert g1.vertex_by_label("0") == 0
    with pytest.raises(KeyError):
        g1.vertex_by_label("c")


@pytest.mark.parametrize("seed", range(40))
def test_strategy_valuation_matches_lasso_values(seed):
    """Gaussian solve and lasso summation are independent computations of the same value."""
    game = random_game(seed)
    rng = np.random.default_rng(seed)
    for _ in range(25):
        strategy = JointStrategy(tuple(out[int(rng.integers(0, len(out)))] for out in game.out_edges))
        val = joint_strategy_valuation(game, strategy)
        for v in range(game.n_vertices):
            assert val[v] == lasso_value(game, lasso_of(game, strategy, v))


# ---------------------------------------------------------------------------
# Generator and enumeration
# ---------------------------------------------------------------------------


def test_generate_single_vertex_game():
    game = generate_random_game(1, 1, 0, [Fraction(1, 2)], seed=5)
    assert game.n_vertices == 1
    assert game.edges == (Edge(0, 0, 0, Fraction(0), Fraction(1, 2)),)


def test_generate_is_deterministic():
    first = generate_random_game(6, 3, 4, DISCOUNT_POOL, seed=11)
    second = generate_random_game(6, 3, 4, DISCOUNT_POOL, seed=11)
    assert first == second
    assert serialize_game(first) == serialize_game(second)


def test_generated_games_are_valid():
    game = generate_random_game(6, 3, 4, DISCOUNT_POOL, seed=3)
    assert validate_game(game) == []
    assert all(len(out) == 3 for out in game.out_edges)
    assert all(abs(e.weight) <= 4 and e.discount in DISCOUNT_POOL for e in game.edges)


@pytest.mark.parametrize(
    "args",
    [(0, 1, 4, DISCOUNT_POOL), (2, 0, 4, DISCOUNT_POOL), (2, 1, -1, DISCOUNT_POOL), (2, 1, 4, [Fraction(1)])],
)
def test_generate_rejects_bad_parameters(args):
    with pytest.raises(ValueError):
        generate_random_game(*args, seed=0)


def test_strategy_enumeration(g1):
    assert g1.strategy_count() == 2
    assert [s.edges for s in all_joint_strategies(g1)] == [(E_AA, E_BB), (E_AA, E_BA)]
    assert lowest_edge_strategy(g1).edges == (E_AA, E_BB)
    assert check_strategy_cap(g1, 2) == 2
    with pytest.raises(StrategyCapExceeded):
        check_strategy_cap(g1, 1)
