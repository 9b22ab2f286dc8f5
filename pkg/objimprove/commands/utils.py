"""
Utility functions for dpg-objective-improvement commands
"""

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from ..lib.game_core import Game, Valuation, format_rational, parse_game, parse_rational
from ..lib.improvement import Solution
from ..lib.oracles import OracleReport
from ..lib.solver_config import TraceLevel

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_ERROR = 3

DEFAULT_DISCOUNTS = "1/2,2/3,3/4"


def read_game(path: str, validate: bool = True) -> Game:
    """
    Read and parse a .dpg file.

    Raises:
        OSError: if the file cannot be read
        GameFormatError / InvalidGameError: on bad contents
    """
    text = Path(path).read_text(encoding="utf-8")
    return parse_game(text, validate=validate)


def parse_discount_list(text: str) -> List[Fraction]:
    """Comma-separated rationals, e.g. "1/2,2/3,3/4"."""
    tokens = [t for t in text.split(",") if t.strip()]
    if not tokens:
        raise ValueError("discount list is empty")
    return [parse_rational(t) for t in tokens]


def read_valuation(path: str, game: Game) -> Valuation:
    """
    Read a valuation for ``game``.

    Accepted formats: a ``solve --json`` payload (or any JSON object mapping
    vertex names/ids to rationals), or lines ``<vertex> <rational>`` with ``#``
    comments.

    Raises:
        ValueError: unknown vertex, malformed value or missing vertex
    """
    text = Path(path).read_text(encoding="utf-8")
    entries: Dict[str, str] = {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None

    if isinstance(data, dict):
        mapping = data.get("valuation", data)
        entries = {str(k): str(v) for k, v in mapping.items()}
    else:
        for line_number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = re.split(r"[\s:=]+", line)
            if len(tokens) != 2:
                raise ValueError(f"line {line_number}: expected '<vertex> <rational>'")
            entries[tokens[0]] = tokens[1]

    values: List[Optional[Fraction]] = [None] * game.n_vertices
    for token, value in entries.items():
        try:
            v = game.vertex_by_label(token)
        except KeyError as e:
            raise ValueError(str(e.args[0]))
        values[v] = parse_rational(value)
    missing = [game.label(v) for v, x in enumerate(values) if x is None]
    if missing:
        raise ValueError(f"valuation file misses vertex {missing[0]}")
    return Valuation(tuple(values))


def write_text(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def strategy_mapping(game: Game, solution: Solution) -> Dict[str, str]:
    return {
        game.label(v): game.label(solution.strategies.successor(game, v)) for v in range(game.n_vertices)
    }


def solution_payload(
    game: Game,
    solution: Solution,
    report: Optional[OracleReport] = None,
    trace_level: TraceLevel = TraceLevel.NONE,
) -> Dict[str, object]:
    """Machine-readable result; all rationals are exact ``p/q`` strings."""
    payload: Dict[str, object] = {
        "valuation": solution.valuation.as_dict(game),
        "strategy": strategy_mapping(game, solution),
        "iterations": solution.iterations,
        "pivots": solution.pivots,
        "conditioning": solution.conditioning.as_dict(),
        "oracle": report.as_dict(game) if report is not None else None,
    }
    if trace_level != TraceLevel.NONE:
        payload["trace"] = [
            {
                "index": r.index,
                "kind": r.kind.value,
                "optimum": format_rational(r.optimum),
                "biased_optimum": format_rational(r.biased_optimum),
                "pivots": r.pivots,
                "basis": list(r.basis.edges),
                **(
                    {"strategy": r.strategy_after.describe(game), "valuation": r.valuation.as_dict(game)}
                    if trace_level == TraceLevel.FULL
                    else {}
                ),
            }
            for r in solution.trace
        ]
    return payload
