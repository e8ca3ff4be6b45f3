import pytest

from green_dc.datacenter import DatacenterState
from green_dc.energy.economics import CostModel, EnergySupply
from green_dc.energy.objective import ModelBundle, NetRevenueEvaluator
from green_dc.energy.power import PowerModel
from green_dc.energy.thermal import CoolingModel, ThermalModel, default_d_matrix
from green_dc.forecast import ForecastConfig
from green_dc.strategies import (
    GAConfig,
    JOPStrategy,
    SlotContext,
    StrategyName,
    ThresholdConfig,
    brute_force_optimum,
    build_strategy,
    dlb_step,
    dvmc_step,
    jop_step,
)


T_OUT_C = 22.0


def make_models(n_pms):  # noqa: D103
    return ModelBundle(
        power=PowerModel(),
        cooling=CoolingModel(),
        thermal=ThermalModel.uniform(default_d_matrix(n_pms), 18.0),
        costs=CostModel(),
    )


@pytest.fixture(scope="module")
def small_ga():  # noqa: D103
    return GAConfig(population_size=30, elite_count=4, generations=30, seed_heuristics=False)


def test_jop_consolidates_when_it_saves_brown_energy(small_ga):  # noqa: D103
    state = DatacenterState.build(2, 2, demands=[100.0, 100.0])
    plan = jop_step(state, 0.0, small_ga, make_models(2), T_OUT_C)
    assert len(plan.sleeps) == 1
    assert len(plan.migrated_vms(state)) == 1


def test_jop_avoids_needless_migration_with_free_power(small_ga):  # noqa: D103
    state = DatacenterState.build(2, 2, demands=[100.0, 100.0])
    plan = jop_step(state, 1e9, small_ga, make_models(2), T_OUT_C)
    assert plan.is_noop(state)


def test_jop_reaches_brute_force_optimum(small_ga):  # noqa: D103
    models = make_models(2)
    state = DatacenterState.build(2, 2, demands=[100.0, 100.0])
    evaluator = NetRevenueEvaluator(state, models, T_OUT_C, EnergySupply())
    optimum = brute_force_optimum(state, evaluator)
    assert len(set(optimum.placement)) == 1
    plan = jop_step(state, 0.0, small_ga, models, T_OUT_C)
    assert evaluator.evaluate(plan.new_placement.hosts)[0] == pytest.approx(optimum.fitness)


@pytest.mark.parametrize("seed", range(5))
def test_jop_not_worse_than_heuristics(seed):  # noqa: D103
    models = make_models(4)
    demands = [150.0 + 90.0 * ((seed + j) % 5) for j in range(8)]
    state = DatacenterState.build(4, 8, demands=demands)
    thresholds = ThresholdConfig()
    config = GAConfig(population_size=30, elite_count=4, generations=20, rng_seed=seed)
    supply = EnergySupply.from_power(300.0, state.slot_length_s)
    evaluator = NetRevenueEvaluator(state, models, T_OUT_C, supply)

    plan = jop_step(state, 300.0, config, models, T_OUT_C, thresholds)
    jop_value = evaluator.evaluate(plan.new_placement.hosts)[0]
    for heuristic in (dlb_step, dvmc_step):
        other = heuristic(state, thresholds).new_placement.hosts
        assert jop_value >= evaluator.evaluate(other)[0] - 1e-9


def test_jop_strategy_flags_warm_up():  # noqa: D103
    strategy = build_strategy(
        StrategyName.JOP,
        ThresholdConfig(),
        GAConfig(population_size=10, elite_count=2, generations=2),
        make_models(2),
        ForecastConfig(k_neighbors=2, window_len=1),
    )
    assert isinstance(strategy, JOPStrategy)
    state = DatacenterState.build(2, 2, demands=[100.0, 100.0])
    strategy.plan(state, SlotContext(0, T_OUT_C, 500.0))
    assert strategy.last_forecast_warmup
    assert strategy.last_forecast_w == 500.0

    for value in (100.0, 200.0, 300.0):
        strategy.observe(value)
    strategy.plan(state, SlotContext(3, T_OUT_C, 999.0))
    assert not strategy.last_forecast_warmup
    assert strategy.last_forecast_w != 999.0


def test_build_strategy_by_name():  # noqa: D103
    models = make_models(2)
    for name in ("dlb", "DVMC", "noop"):
        strategy = build_strategy(name, ThresholdConfig(), GAConfig(), models, ForecastConfig())
        assert strategy.name is StrategyName.parse(name)
    with pytest.raises(ValueError):
        StrategyName.parse("annealing")
