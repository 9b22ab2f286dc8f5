"""
Shared fixtures: the two-vertex example games and seeded random games.
"""

from fractions import Fraction
from pathlib import Path

import pytest

from objimprove.lib.game_core import generate_random_game, parse_game

GAMES_DIR = Path(__file__).resolve().parent.parent / "games"
DISCOUNT_POOL = (Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))

E_AA, E_BB, E_BA = 0, 1, 2


def load_game(name: str):
    return parse_game((GAMES_DIR / name).read_text(encoding="utf-8"))


def random_game(seed: int, max_vertices: int = 6, max_degree: int = 3, weight_bound: int = 4):
    """Vertex count and degree are derived from the seed so that sweeps cover small and large shapes."""
    n = 1 + seed % max_vertices
    degree = 1 + (seed // max_vertices) % max_degree
    return generate_random_game(n, degree, weight_bound, DISCOUNT_POOL, seed)


@pytest.fixture
def g1():
    return load_game("g1.dpg")


@pytest.fixture
def g2():
    return load_game("g2.dpg")


@pytest.fixture
def g1_path():
    return str(GAMES_DIR / "g1.dpg")


@pytest.fixture
def g2_path():
    return str(GAMES_DIR / "g2.dpg")


@pytest.fixture
def self_loop_text():
    return "dpg 1\nvertex 0 MAX v\nedge 0 0 1 1/2\n"
