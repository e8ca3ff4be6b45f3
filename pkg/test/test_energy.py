from dataclasses import replace

import numpy as np
import pytest

from green_dc.datacenter import DatacenterState, PhysicalMachine, VirtualMachine
from green_dc.energy.economics import (
    CostModel,
    EnergySupply,
    energy_cost_split,
    net_revenue,
    transition_costs,
)
from green_dc.energy.enumerates import CoolingBranch, PricingMode
from green_dc.energy.power import PowerModel, PowerReading, pm_power, pm_powers
from green_dc.energy.revenue import APP1, RevenueFunction, revenue, revenue_many
from green_dc.energy.thermal import (
    CoolingModel,
    ThermalModel,
    adjust_supply_temperature,
    cooling_branch,
    cop,
    datacenter_power,
    default_d_matrix,
    inlet_temperatures,
    load_d_matrix,
)
from green_dc.utils.errors import ConstraintViolationError, DimensionError, DomainError


@pytest.fixture(scope="module")
def cooling():  # noqa: D103
    return CoolingModel()


@pytest.fixture(scope="module")
def costs():  # noqa: D103
    return CostModel()


def test_pm_power_idle_half_full():  # noqa: D103
    model = PowerModel()
    assert pm_power(0.0, model) == pytest.approx(170.94)
    assert pm_power(0.5, model) == pytest.approx(214.97)
    assert pm_power(1.0, model) == pytest.approx(259.0)


def test_pm_power_rejects_out_of_range():  # noqa: D103
    with pytest.raises(DomainError):
        pm_power(1.2, PowerModel())
    with pytest.raises(ValueError):
        pm_power(-0.1, PowerModel())


def test_pm_power_is_monotone():  # noqa: D103
    model = PowerModel()
    thetas = np.linspace(0, 1, 21)
    powers = [pm_power(float(t), model) for t in thetas]
    assert all(a <= b for a, b in zip(powers, powers[1:], strict=False))


def test_pm_powers_uses_sleep_power():  # noqa: D103
    powers = pm_powers([0.0, 1.0, 0.5], [True, True, False], [259.0] * 3, [0.66] * 3, 5.0)
    np.testing.assert_allclose(powers, [170.94, 259.0, 5.0])


def test_cop_branches(cooling):  # noqa: D103
    assert cop(25.0, 30.0, cooling) == pytest.approx(4.728)
    assert cop(20.0, 30.0, cooling) == pytest.approx(3.194)
    assert cop(25.0, 20.0, cooling) == pytest.approx(2.0)


def test_cop_guard_band_uses_crac(cooling):  # noqa: D103
    assert cooling_branch(25.0, 24.8, cooling) is CoolingBranch.CRAC
    assert cooling_branch(25.0, 24.5, cooling) is CoolingBranch.ECONOMIZER
    assert cop(25.0, 25.0, cooling) == pytest.approx(4.728)


def test_datacenter_power():  # noqa: D103
    assert datacenter_power([600.0, 400.0], 4.0) == pytest.approx(1250.0)
    assert datacenter_power([0.0, 0.0], 4.0) == 0.0
    assert datacenter_power([1000.0], 1e9) == pytest.approx(1000.0)
    with pytest.raises(DomainError):
        datacenter_power([1000.0], 0.0)


def test_inlet_temperatures():  # noqa: D103
    model = ThermalModel.uniform(np.diag([0.01, 0.01]), 18.0)
    np.testing.assert_allclose(inlet_temperatures(model, [200.0, 100.0]), [20.0, 19.0])
    np.testing.assert_allclose(inlet_temperatures(model, [0.0, 0.0]), [18.0, 18.0])
    zero = ThermalModel.uniform(np.zeros((2, 2)), 18.0)
    np.testing.assert_allclose(inlet_temperatures(zero, [200.0, 100.0]), [18.0, 18.0])
    with pytest.raises(DimensionError):
        inlet_temperatures(model, [1.0, 2.0, 3.0])


def test_inlet_temperatures_batch_matches_single():  # noqa: D103
    model = ThermalModel.uniform(default_d_matrix(4), 18.0)
    batch = np.array([[100.0, 200.0, 0.0, 50.0], [259.0, 259.0, 259.0, 259.0]])
    result = inlet_temperatures(model, batch)
    for row, powers in zip(result, batch, strict=True):
        np.testing.assert_allclose(row, inlet_temperatures(model, powers))


def test_thermal_model_rejects_negative_entries():  # noqa: D103
    with pytest.raises(DomainError):
        ThermalModel.uniform(np.array([[0.01, -0.001], [0.0, 0.01]]))
    with pytest.raises(DimensionError):
        ThermalModel(np.zeros((2, 3)), np.zeros(2))


def test_load_d_matrix(tmp_path):  # noqa: D103
    path = tmp_path / "d.csv"
    path.write_text("0.01,0.002\n0.002,0.01\n")
    np.testing.assert_allclose(load_d_matrix(path, 2), [[0.01, 0.002], [0.002, 0.01]])
    with pytest.raises(DimensionError):
        load_d_matrix(path, 3)
    with pytest.raises(FileNotFoundError):
        load_d_matrix(tmp_path / "missing.csv")


def test_adjust_supply_temperature(cooling):  # noqa: D103
    assert adjust_supply_temperature(40.0, cooling) == pytest.approx(20.0)
    assert adjust_supply_temperature(35.0, cooling) == pytest.approx(25.0)
    assert adjust_supply_temperature(30.0, cooling) == pytest.approx(30.0)


def test_revenue_ramp():  # noqa: D103
    assert revenue(100.0, 100.0, APP1) == 100.0
    assert revenue(100.0, 50.0, APP1) == 0.0
    assert revenue(100.0, 70.0, APP1) == pytest.approx(50.0)
    assert revenue(0.0, 0.0, APP1) == 100.0
    with pytest.raises(DomainError):
        revenue(100.0, 120.0, APP1)


def test_revenue_many_matches_scalar():  # noqa: D103
    demands = np.array([100.0, 100.0, 100.0, 0.0, 300.0])
    allocated = np.array([100.0, 50.0, 70.0, 0.0, 200.0])
    expected = [revenue(d, a, APP1) for d, a in zip(demands, allocated, strict=True)]
    result = revenue_many(demands, allocated, APP1.lower_pct, APP1.upper_pct, APP1.u_max_dollars)
    np.testing.assert_allclose(result, expected)


def test_revenue_function_text_and_validation():  # noqa: D103
    assert RevenueFunction.from_text(APP1.to_text()) == APP1
    with pytest.raises(ValueError):
        RevenueFunction(lower_pct=90, upper_pct=50, u_max_dollars=10)


def test_transition_costs(costs):  # noqa: D103
    assert transition_costs(2, 3, costs) == pytest.approx(0.00084)
    assert transition_costs(0, 0, costs) == 0.0
    assert transition_costs(1, 0, costs) == pytest.approx(0.00024)


def test_energy_cost_split(costs):  # noqa: D103
    cost, green, brown = energy_cost_split(2000.0, 3600.0, EnergySupply(1.5), costs)
    assert (cost, green, brown) == pytest.approx((0.04, 1.5, 0.5))

    cost, green, brown = energy_cost_split(2000.0, 3600.0, EnergySupply(5.0), costs)
    assert (cost, brown) == (0.0, 0.0)

    cost, _, _ = energy_cost_split(2000.0, 3600.0, EnergySupply(0.0), costs)
    assert cost == pytest.approx(2.0 * 0.08)


def test_energy_cost_split_strict_mode_bills_green():  # noqa: D103
    strict = CostModel(pricing_mode=PricingMode.STRICT)
    cost, green, brown = energy_cost_split(2000.0, 3600.0, EnergySupply(1.5), strict)
    assert cost == pytest.approx(0.16)
    assert green + brown == pytest.approx(2.0)


def _transition_states():
    before = DatacenterState(
        pms=(
            PhysicalMachine(0),
            PhysicalMachine(1, active=False),
            PhysicalMachine(2, active=False),
        ),
        vms=tuple(VirtualMachine(j, demand_mips=100.0, host=0) for j in range(3)),
    )
    after = DatacenterState(
        pms=tuple(PhysicalMachine(i) for i in range(3)),
        vms=(
            VirtualMachine(0, demand_mips=100.0, host=1),
            VirtualMachine(1, demand_mips=100.0, host=2),
            VirtualMachine(2, demand_mips=100.0, host=1),
        ),
    )
    return before, after


def _reading(total_w):
    return PowerReading((0.0,), total_w * 0.8, total_w, total_w * 0.2, 20.0, 25.0, 4.0)


def test_net_revenue_term_by_term(costs):  # noqa: D103
    before, after = _transition_states()
    ledger = net_revenue(
        before, after, [100.0, 70.0, 50.0], _reading(2000.0), EnergySupply(1.5), costs
    )
    assert ledger.revenue_dollars == pytest.approx(150.0)
    assert ledger.energy_cost_dollars == pytest.approx(0.04)
    assert (ledger.n_wakeups, ledger.n_migrations) == (2, 3)
    assert ledger.net_dollars == pytest.approx(149.95916)
    assert ledger.energy_kwh == pytest.approx(2.0)


def test_net_revenue_unchanged_by_surplus_green(costs):  # noqa: D103
    before, after = _transition_states()
    args = (before, after, [100.0, 70.0, 50.0], _reading(2000.0))
    covered = net_revenue(*args, EnergySupply(3.0), costs)
    doubled = net_revenue(*args, EnergySupply(6.0), costs)
    assert covered.net_dollars == doubled.net_dollars


def test_net_revenue_rejects_violations(costs):  # noqa: D103
    before, after = _transition_states()
    pms = (PhysicalMachine(0), PhysicalMachine(1, active=False), after.pms[2])
    asleep = replace(after, pms=pms)
    with pytest.raises(ConstraintViolationError) as info:
        net_revenue(before, asleep, [100.0, 70.0, 50.0], _reading(0.0), EnergySupply(), costs)
    assert info.value.violations


def test_net_revenue_applies_revenue_factors(costs):  # noqa: D103
    before, after = _transition_states()
    factors = [1.0 - 5.0 / 3600.0, 1.0, 1.0]
    ledger = net_revenue(
        before, after, [100.0, 0.0, 0.0], _reading(0.0), EnergySupply(), costs, factors
    )
    assert ledger.revenue_dollars == pytest.approx(99.861, abs=1e-3)


def test_inlet_temperatures_are_linear_in_power():  # noqa: D103
    model = ThermalModel.uniform(default_d_matrix(5), 18.0)
    rng = np.random.default_rng(5)
    p1, p2 = rng.uniform(0, 259, size=(2, 5))
    a, b = 0.3, 1.7
    rise = inlet_temperatures(model, a * p1 + b * p2) - 18.0
    expected_rise = a * (inlet_temperatures(model, p1) - 18.0) + b * (
        inlet_temperatures(model, p2) - 18.0
    )
    np.testing.assert_allclose(rise, expected_rise)


def test_adjust_supply_temperature_is_decreasing(cooling):  # noqa: D103
    hottest = np.linspace(15.0, 50.0, 36)
    adjusted = [adjust_supply_temperature(t, cooling) for t in hottest]
    assert np.all(np.diff(adjusted) < 0)


@pytest.mark.parametrize("scale", [0.5, 2.0, 10.0])
def test_cost_terms_scale_with_prices(costs, scale):  # noqa: D103
    before, after = _transition_states()
    args = (before, after, [100.0, 70.0, 50.0], _reading(2000.0), EnergySupply(0.5))
    scaled_costs = CostModel(
        energy_price_per_kwh=costs.energy_price_per_kwh * scale,
        wakeup_cost=costs.wakeup_cost * scale,
        migration_cost=costs.migration_cost * scale,
    )
    base = net_revenue(*args, costs)
    scaled = net_revenue(*args, scaled_costs)
    assert scaled.revenue_dollars == base.revenue_dollars
    expected_cost = scale * (base.revenue_dollars - base.net_dollars)
    assert scaled.revenue_dollars - scaled.net_dollars == pytest.approx(expected_cost, rel=1e-12)
