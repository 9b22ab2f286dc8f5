"""
Bench Command - solve a family of generated games and emit one CSV row per game
"""

import csv
import io
import time
from typing import Dict, List

from joblib import Parallel, delayed
from tqdm import tqdm

from ..lib.game_core import generate_random_game
from ..lib.improvement import solve
from ..lib.oracles import cross_check
from ..lib.pylogger import Log
from ..lib.solver_config import OracleConfig, SolverConfig, load_solver_config
from .utils import (
    DEFAULT_DISCOUNTS,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_SOLVER_ERROR,
    EXIT_VERIFICATION_FAILED,
    parse_discount_list,
    write_text,
)

CSV_COLUMNS = ["seed", "vertices", "edges", "iterations", "pivots", "resamples", "wall_time", "oracle"]


def bench_instance(
    seed: int,
    n_vertices: int,
    degree: int,
    weight_bound: int,
    discounts,
    config: SolverConfig,
    oracle_config: OracleConfig,
    check: bool,
) -> Dict[str, object]:
    """Generate, solve and optionally cross-check one game. Failures end up in the oracle column."""
    game = generate_random_game(n_vertices, degree, weight_bound, discounts, seed)
    row: Dict[str, object] = {
        "seed": seed,
        "vertices": game.n_vertices,
        "edges": game.n_edges,
        "iterations": "",
        "pivots": "",
        "resamples": "",
        "wall_time": "",
        "oracle": "-",
    }
    start = time.perf_counter()
    try:
        solution = solve(game, config.with_overrides(seed=seed))
    except Exception as e:
        row["oracle"] = f"ERROR: {e}"
        return row
    row.update(
        iterations=solution.iterations,
        pivots=solution.pivots,
        resamples=solution.conditioning.resamples,
        wall_time=f"{time.perf_counter() - start:.4f}",
    )
    if check:
        report = cross_check(game, solution, oracle_config.tolerance, oracle_config.strategy_cap)
        row["oracle"] = report.verdict.value
    return row


class BenchCommand:
    COMMAND = "bench"
    HELP = "solve generated games and report a CSV"
    FUNCTION = "bench"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--count", type=int, required=True, help="number of games")
        parser.add_argument("--vertices", type=int, required=True, help="vertices per game")
        parser.add_argument("--degree", type=int, required=True, help="outgoing edges per vertex")
        parser.add_argument("--seed", type=int, required=True, help="seed of the first game; game i uses seed + i")
        parser.add_argument("--weight-bound", type=int, default=4, help="weights drawn from [-W, W] (default 4)")
        parser.add_argument("--discounts", default=DEFAULT_DISCOUNTS, help="comma-separated discount pool")
        parser.add_argument("--check", action="store_true", help="cross-check every result with an oracle")
        parser.add_argument("--jobs", type=int, default=1, help="parallel workers (joblib)")
        parser.add_argument("--output", "-o", help="CSV output file (default stdout)")

    def bench(self, args) -> int:
        try:
            if args.count < 1:
                raise ValueError(f"count must be >= 1, got {args.count}")
            if args.vertices < 1 or args.degree < 1 or args.weight_bound < 0 or args.seed < 0:
                raise ValueError("vertices and degree must be >= 1, weight bound and seed >= 0")
            discounts = parse_discount_list(args.discounts)
            config, oracle_config = load_solver_config(args.config)
        except (ValueError, RuntimeError) as e:
            Log.error(f"[BenchCommand] {e}")
            return EXIT_INPUT_ERROR

        seeds = range(args.seed, args.seed + args.count)
        rows: List[Dict[str, object]] = Parallel(n_jobs=args.jobs)(
            delayed(bench_instance)(
                seed, args.vertices, args.degree, args.weight_bound, discounts, config, oracle_config, args.check
            )
            for seed in tqdm(seeds, desc="bench", disable=None)
        )

        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        write_text(buffer.getvalue(), args.output)

        errors = [r["seed"] for r in rows if str(r["oracle"]).startswith("ERROR")]
        failures = [r["seed"] for r in rows if r["oracle"] == "FAIL"]
        if errors:
            Log.error(f"[BenchCommand] Solver errors for seeds {errors}")
            return EXIT_SOLVER_ERROR
        if failures:
            Log.error(f"[BenchCommand] Oracle disagreement for seeds {failures}")
            return EXIT_VERIFICATION_FAILED
        return EXIT_OK


COMMAND_CLASS_MAPPINGS = {
    "bench": BenchCommand,
}
