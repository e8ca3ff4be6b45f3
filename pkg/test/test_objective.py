from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
import pytest

from green_dc.datacenter import (
    DatacenterState,
    Placement,
    allocate_capacity,
    apply_plan,
    plan_from_placement,
)
from green_dc.energy.economics import CostModel, EnergySupply, net_revenue
from green_dc.energy.objective import (
    ModelBundle,
    NetRevenueEvaluator,
    TransitionDelays,
    measure_power,
    revenue_delay_factors,
)
from green_dc.energy.power import PowerModel
from green_dc.energy.revenue import APP1, APP2, APP3
from green_dc.energy.thermal import CoolingModel, ThermalModel, default_d_matrix
from green_dc.simulation import delay_factors
from green_dc.simulation.scenario import SimulationSettings
from green_dc.utils.errors import DimensionError


@pytest.fixture(scope="module")
def models():  # noqa: D103
    return ModelBundle(
        power=PowerModel(),
        cooling=CoolingModel(),
        thermal=ThermalModel.uniform(default_d_matrix(3), 18.0),
        costs=CostModel(),
    )


@pytest.fixture(scope="module")
def state():  # noqa: D103
    base = DatacenterState.build(3, 6, profiles=(APP1, APP2, APP3))
    return base.with_demands([400.0, 900.0, 300.0, 700.0, 200.0, 650.0], slot_index=3)


def ledger_net(state, hosts, models, t_out_c, supply):  # noqa: D103
    plan = plan_from_placement(state, Placement(hosts))
    planned, _ = apply_plan(state, plan)
    allocations = allocate_capacity(planned, planned.placement)
    committed = planned.with_allocations(allocations)
    reading = measure_power(committed, models, t_out_c)
    return net_revenue(state, committed, allocations, reading, supply, models.costs).net_dollars


@pytest.mark.parametrize(
    "hosts",
    [
        (0, 1, 2, 0, 1, 2),
        (0, 0, 1, 1, 2, 2),
        (0, 0, 0, 1, 1, 1),
        (2, 2, 2, 2, 2, 2),
    ],
)
@pytest.mark.parametrize("t_out_c", [12.0, 31.0])
def test_evaluator_matches_ledger(state, models, hosts, t_out_c):  # noqa: D103
    supply = EnergySupply.from_power(1500.0, state.slot_length_s)
    evaluator = NetRevenueEvaluator(state, models, t_out_c, supply)
    expected = ledger_net(state, hosts, models, t_out_c, supply)
    assert evaluator.evaluate(hosts)[0] == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_evaluator_batch_equals_rows(state, models):  # noqa: D103
    evaluator = NetRevenueEvaluator(state, models, 20.0, EnergySupply())
    rng = np.random.default_rng(3)
    population = rng.integers(0, 3, size=(16, 6))
    batch = evaluator(population)
    rows = [evaluator.evaluate(p)[0] for p in population]
    np.testing.assert_allclose(batch, rows)
    assert evaluator.evaluations == 32


def test_evaluator_rejects_bad_genes(state, models):  # noqa: D103
    evaluator = NetRevenueEvaluator(state, models, 20.0, EnergySupply())
    with pytest.raises(DimensionError):
        evaluator.evaluate([0, 1, 2])
    with pytest.raises(DimensionError):
        evaluator.evaluate([0, 1, 2, 3, 0, 1])


def test_free_green_energy_favours_no_migration(state, models):  # noqa: D103
    evaluator = NetRevenueEvaluator(state, models, 20.0, EnergySupply(1e6))
    current = evaluator.evaluate(state.hosts)[0]
    moved = evaluator.evaluate([1, 1, 2, 0, 1, 2])[0]
    assert current > moved


def test_measure_power_skips_sleeping_pms(models):  # noqa: D103
    state = DatacenterState.build(3, 2, demands=[300.0, 300.0])
    plan = plan_from_placement(state, Placement((0, 1)))
    planned, _ = apply_plan(state, plan)
    committed = planned.with_allocations(allocate_capacity(planned, planned.placement))
    reading = measure_power(committed, models, 20.0)
    assert reading.pm_powers_w[2] == 0.0
    assert reading.it_power_w == pytest.approx(2 * 259.0 * (0.66 + 0.34 * 0.2))
    assert reading.total_power_w == pytest.approx(reading.it_power_w * (1 + 1 / reading.cop))


@pytest.fixture(scope="module")
def settings():  # noqa: D103
    return SimulationSettings()


@pytest.fixture(scope="module")
def delayed_models(models, settings):  # noqa: D103
    return replace(models, delays=settings.delays())


@pytest.fixture(scope="module")
def consolidated(state):  # noqa: D103
    plan = plan_from_placement(state, Placement((0, 0, 0, 1, 1, 1)))
    moved, _ = apply_plan(state, plan)
    return moved.with_demands(state.demands, slot_index=4)


def delayed_ledger_net(state, hosts, models, settings, t_out_c, supply):  # noqa: D103
    planned, counts = apply_plan(state, plan_from_placement(state, Placement(hosts)))
    allocations = allocate_capacity(planned, planned.placement)
    committed = planned.with_allocations(allocations)
    reading = measure_power(committed, models, t_out_c)
    factors = delay_factors(committed, counts, settings)
    ledger = net_revenue(
        state, committed, allocations, reading, supply, models.costs, revenue_factors=factors
    )
    return ledger.net_dollars


@pytest.mark.parametrize(
    "hosts",
    [
        (0, 0, 0, 1, 1, 1),
        (0, 0, 2, 1, 1, 1),
        (2, 2, 2, 1, 0, 0),
        (0, 1, 2, 0, 1, 2),
    ],
)
def test_delayed_evaluator_matches_simulator_ledger(  # noqa: D103
    consolidated, delayed_models, settings, hosts
):
    supply = EnergySupply.from_power(800.0, consolidated.slot_length_s)
    evaluator = NetRevenueEvaluator(consolidated, delayed_models, 24.0, supply)
    expected = delayed_ledger_net(consolidated, hosts, delayed_models, settings, 24.0, supply)
    assert evaluator.evaluate(hosts)[0] == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_delays_penalise_moves_only(consolidated, models, delayed_models):  # noqa: D103
    supply = EnergySupply()
    plain = NetRevenueEvaluator(consolidated, models, 20.0, supply)
    delayed = NetRevenueEvaluator(consolidated, delayed_models, 20.0, supply)
    ignored = NetRevenueEvaluator(consolidated, delayed_models, 20.0, supply, apply_delays=False)
    stay = consolidated.hosts
    woken = [0, 0, 2, 1, 1, 1]
    assert delayed.evaluate(stay)[0] == plain.evaluate(stay)[0]
    assert delayed.evaluate(woken)[0] < plain.evaluate(woken)[0]
    assert ignored.evaluate(woken)[0] == plain.evaluate(woken)[0]


def test_revenue_delay_factors(settings):  # noqa: D103
    migrated = np.array([[True, False, True], [False, False, False]])
    on_woken = np.array([[True, True, False], [False, False, True]])
    factors = revenue_delay_factors(migrated, on_woken, settings.delays(), 3600.0)
    expected_migrated = 1.0 - 5.0 / 3600.0
    expected_woken = 1.0 - 15.0 / 3600.0
    expected = [
        [expected_migrated * expected_woken, expected_woken, expected_migrated],
        [1.0, 1.0, expected_woken],
    ]
    np.testing.assert_allclose(factors, expected)
    assert np.all(revenue_delay_factors(migrated, on_woken, TransitionDelays(), 3600.0) == 1.0)
    with pytest.raises(DimensionError):
        revenue_delay_factors(migrated, on_woken[:, :2], settings.delays(), 3600.0)


def test_evaluation_count_under_threads(state, models):  # noqa: D103
    evaluator = NetRevenueEvaluator(state, models, 20.0, EnergySupply())
    population = np.random.default_rng(9).integers(0, 3, size=(4, 6))
    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(evaluator, [population] * 200))
    assert evaluator.evaluations == 800
