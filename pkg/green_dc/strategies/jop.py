import logging

import numpy as np

from green_dc.datacenter import ActionPlan, DatacenterState, plan_from_placement
from green_dc.energy.economics import EnergySupply
from green_dc.energy.objective import ModelBundle, NetRevenueEvaluator
from green_dc.strategies.genetic import GAConfig, ga_optimize
from green_dc.strategies.heuristics import ThresholdConfig, dlb_step, dvmc_step


logger = logging.getLogger(__name__)


def jop_step(  # noqa: PLR0913
    state: DatacenterState,
    green_forecast_w: float,
    ga_config: GAConfig,
    models: ModelBundle,
    t_out_c: float,
    thresholds: ThresholdConfig | None = None,
    history: list[float] | None = None,
) -> ActionPlan:
    """Joint optimization plan: genetic search on the one-slot net revenue.

    Candidates are scored against the forecast green supply, with transition
    costs and delays relative to ``state``. The random stream is seeded from
    the GA seed and the slot index.

    Args:
        state (DatacenterState): Current state with this slot's demands.
        green_forecast_w (float): Forecast renewable generation, W.
        ga_config (GAConfig): Search parameters.
        models (ModelBundle): Physical and economic models.
        t_out_c (float): Outside temperature of the slot, °C.
        thresholds (ThresholdConfig | None): Thresholds of the heuristic seeds.
        history (list[float] | None): Receives the GA best-ever trace.

    Returns:
        ActionPlan: Wakes PMs gaining VMs and sleeps PMs left empty.
    """
    supply = EnergySupply.from_power(green_forecast_w, state.slot_length_s)
    evaluator = NetRevenueEvaluator(
        state, models, t_out_c, supply, apply_delays=ga_config.delay_aware
    )

    seeds = []
    if ga_config.seed_heuristics:
        thresholds = thresholds or ThresholdConfig()
        seeds = [
            dlb_step(state, thresholds).new_placement,
            dvmc_step(state, thresholds).new_placement,
        ]

    rng = np.random.default_rng([ga_config.rng_seed, state.slot_index])
    best = ga_optimize(
        state.placement, evaluator, ga_config, state.n_pms, seeds=seeds, rng=rng, history=history
    )
    logger.debug(
        "jop slot %d: best %.4f after %d evaluations",
        state.slot_index,
        best.fitness,
        evaluator.evaluations,
    )
    return plan_from_placement(state, best.genome)
