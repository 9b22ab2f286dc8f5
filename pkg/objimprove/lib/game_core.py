"""
Discounted payoff games: data model, .dpg format, plays and strategy values.

A game is a sinkless directed graph whose vertices belong to MIN or MAX and
whose edges carry an exact rational weight and a discount in [0, 1). Vertex
and edge ids are dense 0-based indices; an edge's id is its position in
``Game.edges``.
"""

import itertools
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import exact_linalg
from .pylogger import Log


class Owner(str, Enum):
    MIN = "MIN"
    MAX = "MAX"


class GameFormatError(ValueError):
    """Malformed .dpg text. ``line_number`` is 1-based, None for whole-file errors."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(prefix + message)


class InvalidGameError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid game: " + "; ".join(self.violations))


class StrategyCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: int
    owner: Owner
    name: Optional[str] = None

    @property
    def label(self) -> str:
        return self.name if self.name is not None else str(self.id)


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    weight: Fraction
    discount: Fraction


@dataclass(frozen=True)
class Game:
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def out_edges(self) -> Tuple[Tuple[int, ...], ...]:
        """Outgoing edge ids per vertex, ascending. Out-of-range sources are skipped."""
        buckets: List[List[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            if 0 <= e.src < len(buckets):
                buckets[e.src].append(e.id)
        return tuple(tuple(b) for b in buckets)

    def owner(self, v: int) -> Owner:
        return self.vertices[v].owner

    def label(self, v: int) -> str:
        return self.vertices[v].label

    def vertex_by_label(self, token: str) -> int:
        """
        Resolve a vertex name or numeric id.

        Raises:
            KeyError: if no vertex matches
        """
        for v in self.vertices:
            if v.name == token:
                return v.id
        if re.fullmatch(r"\d+", token) and int(token) < self.n_vertices:
            return int(token)
        raise KeyError(f"unknown vertex '{token}'")

    def strategy_count(self) -> int:
        count = 1
        for out in self.out_edges:
            count *= len(out)
        return count

    def restrict(self, edge_ids: Iterable[int]) -> "Game":
        """Same vertices, only the given edges, re-indexed densely in ascending original id."""
        kept = sorted(set(edge_ids))
        edges = tuple(
            Edge(i, self.edges[e].src, self.edges[e].dst, self.edges[e].weight, self.edges[e].discount)
            for i, e in enumerate(kept)
        )
        return Game(self.vertices, edges)

    def with_weights(self, weights: Sequence[Fraction]) -> "Game":
        edges = tuple(
            Edge(e.id, e.src, e.dst, Fraction(w), e.discount) for e, w in zip(self.edges, weights)
        )
        return Game(self.vertices, edges)


@dataclass(frozen=True)
class JointStrategy:
    """
    One chosen outgoing edge per vertex, for both players.

    Edges rather than successors are stored because parallel edges are allowed.
    """

    edges: Tuple[int, ...]

    def edge(self, v: int) -> int:
        return self.edges[v]

    def successor(self, game: Game, v: int) -> int:
        return game.edges[self.edges[v]].dst

    def successors(self, game: Game) -> Tuple[int, ...]:
        return tuple(game.edges[e].dst for e in self.edges)

    def is_valid(self, game: Game) -> bool:
        if len(self.edges) != game.n_vertices:
            return False
        return all(0 <= e < game.n_edges and game.edges[e].src == v for v, e in enumerate(self.edges))

    @classmethod
    def from_successors(cls, game: Game, choice: Mapping[int, int]) -> "JointStrategy":
        """
        Build a strategy from a successor map v -> v'.

        The lowest edge id between v and v' is used.

        Raises:
            ValueError: if (v, v') is not an edge or a vertex is missing
        """
        chosen = []
        for v in range(game.n_vertices):
            if v not in choice:
                raise ValueError(f"no successor given for vertex {game.label(v)}")
            match = [e for e in game.out_edges[v] if game.edges[e].dst == choice[v]]
            if not match:
                raise ValueError(f"({game.label(v)}, {game.label(choice[v])}) is not an edge")
            chosen.append(match[0])
        return cls(tuple(chosen))

    def describe(self, game: Game) -> str:
        return ", ".join(
            f"{game.label(v)}->{game.label(self.successor(game, v))}" for v in range(game.n_vertices)
        )


@dataclass(frozen=True)
class Lasso:
    prefix: Tuple[int, ...]
    cycle: Tuple[int, ...]


@dataclass(frozen=True)
class Valuation:
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(x) for x in self.values))

    @classmethod
    def of(cls, *values) -> "Valuation":
        return cls(tuple(values))

    def __getitem__(self, v: int) -> Fraction:
        return self.values[v]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self, game: Game) -> Dict[str, str]:
        return {game.label(v): format_rational(x) for v, x in enumerate(self.values)}

    def describe(self, game: Game) -> str:
        return ", ".join(f"{game.label(v)} = {format_rational(x)}" for v, x in enumerate(self.values))


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def parse_rational(token: str) -> Fraction:
    """
    Parse ``p/q`` or ``p``.

    Raises:
        ValueError: "zero denominator" or "malformed rational"
    """
    match = _RATIONAL_RE.match(token.strip())
    if not match:
        raise ValueError(f"malformed rational '{token}'")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ValueError(f"zero denominator in '{token}'")
    return Fraction(numerator, denominator)


def format_rational(value) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# Validation and .dpg text format
# ---------------------------------------------------------------------------


def validate_game(game: Game) -> List[str]:
    """
    Check the game invariants.

    Returns:
        list of violations; empty means the game is valid
    """
    violations: List[str] = []
    if not game.vertices:
        violations.append("game has no vertices")
    for i, v in enumerate(game.vertices):
        if v.id != i:
            violations.append(f"vertex at position {i} has id {v.id}")
    n = game.n_vertices
    for i, e in enumerate(game.edges):
        if e.id != i:
            violations.append(f"edge at position {i} has id {e.id}")
        if not 0 <= e.src < n:
            violations.append(f"edge {e.id}: source {e.src} out of range")
        if not 0 <= e.dst < n:
            violations.append(f"edge {e.id}: target {e.dst} out of range")
        if not 0 <= e.discount < 1:
            violations.append(f"edge {e.id}: discount {format_rational(e.discount)} not in [0,1)")
    for v, out in enumerate(game.out_edges):
        if not out:
            violations.append(f"vertex {game.label(v)} has no outgoing edge")
    return violations


def parse_game(text: str, validate: bool = True) -> Game:
    """
    Parse the .dpg text format.

    Args:
        text: file contents
        validate: raise InvalidGameError when the parsed game violates an invariant

    Returns:
        Game

    Raises:
        GameFormatError: malformed line, with its line number
        InvalidGameError: structurally parsed but invalid game (validate=True)
    """
    n_vertices: Optional[int] = None
    vertices: Dict[int, Vertex] = {}
    edges: List[Edge] = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]

        if keyword == "dpg":
            if n_vertices is not None:
                raise GameFormatError("duplicate 'dpg' header", line_number)
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise GameFormatError("expected 'dpg <numVertices>'", line_number)
            n_vertices = int(tokens[1])
            continue

        if n_vertices is None:
            raise GameFormatError("missing 'dpg <numVertices>' header", line_number)

        if keyword == "vertex":
            if len(tokens) not in (3, 4) or not tokens[1].isdigit():
                raise GameFormatError("expected 'vertex <id> <MIN|MAX> [name]'", line_number)
            vid = int(tokens[1])
            if vid >= n_vertices:
                raise GameFormatError(f"vertex id {vid} out of range", line_number)
            if vid in vertices:
                raise GameFormatError(f"duplicate vertex id {vid}", line_number)
            try:
                owner = Owner(tokens[2].upper())
            except ValueError:
                raise GameFormatError(f"unknown owner '{tokens[2]}'", line_number)
            name = tokens[3] if len(tokens) == 4 else None
            if name is not None:
                if name.isdigit():
                    raise GameFormatError(f"vertex name '{name}' is numeric", line_number)
                if any(v.name == name for v in vertices.values()):
                    raise GameFormatError(f"duplicate vertex name '{name}'", line_number)
            vertices[vid] = Vertex(vid, owner, name)

        elif keyword == "edge":
            if len(tokens) != 5:
                raise GameFormatError("expected 'edge <src> <dst> <weight> <discount>'", line_number)
            try:
                src, dst = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise GameFormatError("edge endpoints must be integers", line_number)
            for endpoint in (src, dst):
                if not 0 <= endpoint < n_vertices:
                    raise GameFormatError(f"edge endpoint {endpoint} out of range", line_number)
            try:
                weight = parse_rational(tokens[3])
                discount = parse_rational(tokens[4])
            except ValueError as e:
                raise GameFormatError(str(e), line_number)
            edges.append(Edge(len(edges), src, dst, weight, discount))

        else:
            raise GameFormatError(f"unknown keyword '{keyword}'", line_number)

    if n_vertices is None:
        raise GameFormatError("missing 'dpg <numVertices>' header")
    missing = [v for v in range(n_vertices) if v not in vertices]
    if missing:
        raise GameFormatError(f"vertex {missing[0]} not declared")

    game = Game(tuple(vertices[v] for v in range(n_vertices)), tuple(edges))
    if validate:
        violations = validate_game(game)
        if violations:
            raise InvalidGameError(violations)
    return game


def serialize_game(game: Game) -> str:
    """Canonical .dpg text: header, vertices by id, edges by id, rationals as p/q."""
    lines = [f"dpg {game.n_vertices}"]
    for v in game.vertices:
        suffix = f" {v.name}" if v.name is not None else ""
        lines.append(f"vertex {v.id} {v.owner.value}{suffix}")
    for e in game.edges:
        lines.append(f"edge {e.src} {e.dst} {format_rational(e.weight)} {format_rational(e.discount)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Plays and strategy values
# ---------------------------------------------------------------------------


def lasso_of(game: Game, strategy: JointStrategy, v: int) -> Lasso:
    """Follow the strategy from v until a vertex repeats."""
    first_seen: Dict[int, int] = {}
    path: List[int] = []
    current = v
    while current not in first_seen:
        first_seen[current] = len(path)
        e = strategy.edge(current)
        path.append(e)
        current = game.edges[e].dst
    entry = first_seen[current]
    return Lasso(tuple(path[:entry]), tuple(path[entry:]))


def lasso_value(game: Game, lasso: Lasso) -> Fraction:
    """Exact discounted sum of the infinite play described by the lasso."""
    total = Fraction(0)
    discount = Fraction(1)
    for e in lasso.prefix:
        edge = game.edges[e]
        total += discount * edge.weight
        discount *= edge.discount

    cycle_sum = Fraction(0)
    cycle_discount = Fraction(1)
    for e in lasso.cycle:
        edge = game.edges[e]
        cycle_sum += cycle_discount * edge.weight
        cycle_discount *= edge.discount

    return total + discount * cycle_sum / (1 - cycle_discount)


def joint_strategy_valuation(game: Game, strategy: JointStrategy) -> Valuation:
    """
    Solve val(v) = w_e + λ_e val(v') for e = (v, v') chosen by the strategy.

    The matrix I - Λ P is strictly diagonally dominant by rows, so the solve
    never fails.
    """
    n = game.n_vertices
    matrix = exact_linalg.zeros((n, n))
    rhs = []
    for v in range(n):
        edge = game.edges[strategy.edge(v)]
        matrix[v, v] += 1
        matrix[v, edge.dst] -= edge.discount
        rhs.append(edge.weight)
    solution = exact_linalg.solve(matrix, rhs)
    return Valuation(tuple(solution))


def generate_random_game(
    n_vertices: int,
    out_degree: int,
    weight_bound: int,
    discount_pool: Sequence[Fraction],
    seed: int,
) -> Game:
    """
    Random valid game with exactly ``out_degree`` edges per vertex.

    Args:
        n_vertices: number of vertices, >= 1
        out_degree: edges per vertex, >= 1 (targets drawn with replacement)
        weight_bound: integer weights are drawn from [-weight_bound, weight_bound]
        discount_pool: discounts are drawn uniformly from this pool
        seed: numpy seed; the same arguments always give the same game

    Returns:
        Game
    """
    if n_vertices < 1:
        raise ValueError(f"n_vertices must be >= 1, got {n_vertices}")
    if out_degree < 1:
        raise ValueError(f"out_degree must be >= 1, got {out_degree}")
    if weight_bound < 0:
        raise ValueError(f"weight_bound must be >= 0, got {weight_bound}")
    pool = [Fraction(d) for d in discount_pool]
    if not pool or any(not 0 <= d < 1 for d in pool):
        raise ValueError("discount pool must be nonempty with values in [0,1)")

    rng = np.random.default_rng(seed)
    owners = rng.integers(0, 2, size=n_vertices)
    vertices = tuple(Vertex(v, Owner.MAX if owners[v] else Owner.MIN) for v in range(n_vertices))

    edges: List[Edge] = []
    for v in range(n_vertices):
        targets = rng.integers(0, n_vertices, size=out_degree)
        weights = rng.integers(-weight_bound, weight_bound + 1, size=out_degree)
        picks = rng.integers(0, len(pool), size=out_degree)
        for dst, w, k in zip(targets, weights, picks):
            edges.append(Edge(len(edges), v, int(dst), Fraction(int(w)), pool[int(k)]))

    game = Game(vertices, tuple(edges))
    Log.debug(f"[GameCore] Generated game seed={seed}: {n_vertices} vertices, {len(edges)} edges")
    return game


def lowest_edge_strategy(game: Game) -> JointStrategy:
    return JointStrategy(tuple(out[0] for out in game.out_edges))


def all_joint_strategies(game: Game) -> Iterable[JointStrategy]:
    """Every joint strategy, in lexicographic order of per-vertex edge choice."""
    for combo in itertools.product(*game.out_edges):
        yield JointStrategy(tuple(combo))


def check_strategy_cap(game: Game, cap: int) -> int:
    """
    Number of joint strategies, or StrategyCapExceeded if it is above cap.
    """
    count = game.strategy_count()
    if count > cap:
        raise StrategyCapExceeded(f"{count} joint strategies exceed the cap of {cap}")
    return count
