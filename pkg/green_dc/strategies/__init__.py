from __future__ import annotations

from green_dc.strategies.base import (
    DLBStrategy,
    DVMCStrategy,
    JOPStrategy,
    MigrationStrategy,
    NoopStrategy,
    SlotContext,
    build_strategy,
)
from green_dc.strategies.enumerates import StrategyName
from green_dc.strategies.genetic import (
    GAConfig,
    Individual,
    Population,
    ga_crossover,
    ga_mutate,
    ga_optimize,
    ga_select,
    selection_probabilities,
)
from green_dc.strategies.heuristics import ThresholdConfig, dlb_step, dvmc_step
from green_dc.strategies.jop import jop_step
from green_dc.strategies.oracle import OracleResult, brute_force_optimum


__all__ = [
    "DLBStrategy",
    "DVMCStrategy",
    "GAConfig",
    "Individual",
    "JOPStrategy",
    "MigrationStrategy",
    "NoopStrategy",
    "OracleResult",
    "Population",
    "SlotContext",
    "StrategyName",
    "ThresholdConfig",
    "brute_force_optimum",
    "build_strategy",
    "dlb_step",
    "dvmc_step",
    "ga_crossover",
    "ga_mutate",
    "ga_optimize",
    "ga_select",
    "jop_step",
    "selection_probabilities",
]
