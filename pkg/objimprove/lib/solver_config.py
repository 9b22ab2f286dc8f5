"""
Solver Configuration Management for dpg-objective-improvement

Provides the SolverConfig knobs (seed, offset factors, noise policy, pivot
mode, caps, tracing) and the oracle settings. Values come from an optional
YAML file and can be overridden from the command line.
"""

import os
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .pylogger import Log


class NoisePolicy(str, Enum):
    NEVER = "never"
    ON_DEGENERACY = "on-degeneracy"
    ALWAYS = "always"


class PivotMode(str, Enum):
    LP_FIRST = "lp-first"
    MIXED = "mixed"


class TraceLevel(str, Enum):
    NONE = "none"
    SUMMARY = "summary"
    FULL = "full"


DEFAULT_CONFIG_NAME = "solver_config.yaml"
CONFIG_ENV_VAR = "OBJIMPROVE_CONFIG"
DEFAULT_MAX_RESAMPLES = 16
DEFAULT_TOLERANCE = Fraction(1, 10**6)
DEFAULT_STRATEGY_CAP = 2**20


@dataclass(frozen=True)
class SolverConfig:
    """
    Knobs of the objective-improvement driver.

    ``max_iterations`` of None means 64 LP solves per edge of the game.
    """

    seed: int = 0
    use_offset_factors: bool = True
    noise_policy: NoisePolicy = NoisePolicy.ON_DEGENERACY
    pivot_mode: PivotMode = PivotMode.LP_FIRST
    max_iterations: Optional[int] = None
    max_resamples: int = DEFAULT_MAX_RESAMPLES
    trace_level: TraceLevel = TraceLevel.NONE
    randomize_initial_strategy: bool = False

    def __post_init__(self):
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.max_resamples < 0:
            raise ValueError(f"max_resamples must be >= 0, got {self.max_resamples}")

    def iteration_cap(self, n_edges: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 64 * max(n_edges, 1)

    def with_overrides(self, **overrides: Any) -> "SolverConfig":
        """Copy with the given fields replaced; None values are ignored."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class OracleConfig:
    tolerance: Fraction = DEFAULT_TOLERANCE
    strategy_cap: int = DEFAULT_STRATEGY_CAP


class SolverConfigLoader:
    """
    Reads ``solver:`` and ``oracle:`` sections from a YAML file.

    Lookup order when no path is given: ``$OBJIMPROVE_CONFIG``, then
    ``./solver_config.yaml``. A missing file means defaults. Bad values are
    reported and replaced by their defaults.
    """

    def __init__(self, config_path: Optional[Path] = None):
        self.solver: Dict[str, Any] = {}
        self.oracle: Dict[str, Any] = {}
        self.path = self._resolve_path(config_path)
        if self.path is not None:
            self._load_config(self.path)

    @staticmethod
    def _resolve_path(config_path: Optional[Path]) -> Optional[Path]:
        if config_path is not None:
            return Path(config_path)
        env_path = os.environ.get(CONFIG_ENV_VAR)
        if env_path:
            return Path(env_path)
        local = Path.cwd() / DEFAULT_CONFIG_NAME
        return local if local.exists() else None

    def _load_config(self, config_path: Path):
        if not config_path.exists():
            Log.warning(f"[SolverConfig] Config file not found: {config_path}, using defaults")
            return

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            Log.warning(f"[SolverConfig] Failed to parse config file: {e}")
            Log.warning("[SolverConfig] Falling back to default configuration")
            return

        if data and isinstance(data, dict):
            self.solver = data.get("solver") or {}
            self.oracle = data.get("oracle") or {}
            Log.info(f"[SolverConfig] Loaded {config_path}")

    def _get_enum(self, key: str, enum_cls, default):
        value = self.solver.get(key)
        if value is None:
            return default
        try:
            return enum_cls(str(value).lower())
        except ValueError:
            choices = ", ".join(m.value for m in enum_cls)
            Log.warning(f"[SolverConfig] Invalid {key} '{value}' (expected one of {choices}), using default")
            return default

    def _get_int(self, section: Dict[str, Any], key: str, default: Optional[int], minimum: int):
        value = section.get(key)
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            Log.warning(f"[SolverConfig] Invalid {key} '{value}' (expected integer >= {minimum}), using default")
            return default
        return value

    def get_seed(self) -> int:
        return self._get_int(self.solver, "seed", 0, minimum=0)

    def _get_bool(self, key: str, default: bool) -> bool:
        value = self.solver.get(key)
        if value is None:
            return default
        if not isinstance(value, bool):
            Log.warning(f"[SolverConfig] Invalid {key} '{value}' (expected true or false), using default")
            return default
        return value

    def get_use_offset_factors(self) -> bool:
        return self._get_bool("use_offset_factors", True)

    def get_randomize_initial_strategy(self) -> bool:
        return self._get_bool("randomize_initial_strategy", False)

    def get_noise_policy(self) -> NoisePolicy:
        return self._get_enum("noise_policy", NoisePolicy, NoisePolicy.ON_DEGENERACY)

    def get_pivot_mode(self) -> PivotMode:
        return self._get_enum("pivot_mode", PivotMode, PivotMode.LP_FIRST)

    def get_trace_level(self) -> TraceLevel:
        return self._get_enum("trace_level", TraceLevel, TraceLevel.NONE)

    def get_max_iterations(self) -> Optional[int]:
        return self._get_int(self.solver, "max_iterations", None, minimum=1)

    def get_max_resamples(self) -> int:
        return self._get_int(self.solver, "max_resamples", DEFAULT_MAX_RESAMPLES, minimum=0)

    def get_tolerance(self) -> Fraction:
        value = self.oracle.get("tolerance")
        if value is None:
            return DEFAULT_TOLERANCE
        try:
            tolerance = Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            tolerance = None
        if tolerance is None or tolerance <= 0:
            Log.warning(f"[SolverConfig] Invalid tolerance '{value}', using default")
            return DEFAULT_TOLERANCE
        return tolerance

    def get_strategy_cap(self) -> int:
        return self._get_int(self.oracle, "strategy_cap", DEFAULT_STRATEGY_CAP, minimum=1)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            seed=self.get_seed(),
            use_offset_factors=self.get_use_offset_factors(),
            noise_policy=self.get_noise_policy(),
            pivot_mode=self.get_pivot_mode(),
            max_iterations=self.get_max_iterations(),
            max_resamples=self.get_max_resamples(),
            trace_level=self.get_trace_level(),
            randomize_initial_strategy=self.get_randomize_initial_strategy(),
        )

    def oracle_config(self) -> OracleConfig:
        return OracleConfig(tolerance=self.get_tolerance(), strategy_cap=self.get_strategy_cap())


def load_solver_config(config_path: Optional[Path] = None):
    """
    Convenience function returning (SolverConfig, OracleConfig).

    Raises:
        RuntimeError: if an explicitly given config file does not exist
    """
    if config_path is not None and not Path(config_path).exists():
        raise RuntimeError(f"Config file not found: {config_path}")
    loader = SolverConfigLoader(config_path)
    return loader.solver_config(), loader.oracle_config()
