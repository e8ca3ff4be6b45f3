import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from green_dc.datacenter import DatacenterState, validate_placement
from green_dc.energy.enumerates import PricingMode
from green_dc.energy.power import PowerReading
from green_dc.energy.revenue import revenue
from green_dc.utils.errors import ConstraintViolationError, DimensionError, DomainError


JOULES_PER_KWH = 3.6e6


class CostModel(BaseModel):
    """Prices of energy and of state transitions.

    Attributes:
        energy_price_per_kwh (float): Grid energy price, $/kWh.
        wakeup_cost (float): Cost of activating a sleeping PM, $.
        migration_cost (float): Cost of moving one VM, $.
        pricing_mode (PricingMode): Whether green energy is free.
    """

    model_config = ConfigDict(frozen=True)

    energy_price_per_kwh: float = Field(0.08, ge=0)
    wakeup_cost: float = Field(0.00024, ge=0)
    migration_cost: float = Field(0.00012, ge=0)
    pricing_mode: PricingMode = PricingMode.GREEN_FIRST


@dataclass(frozen=True)
class EnergySupply:
    """Energy available to the datacenter in one slot.

    Attributes:
        green_available_kwh (float): Renewable energy generated during the slot.
        grid_unlimited (bool): The grid covers any remainder.
    """

    green_available_kwh: float = 0.0
    grid_unlimited: bool = True

    def __post_init__(self):
        if self.green_available_kwh < 0:
            raise DomainError("green_available_kwh must be non-negative")

    @classmethod
    def from_power(cls, green_power_w: float, slot_length_s: float) -> "EnergySupply":
        """Supply produced by a constant ``green_power_w`` over one slot."""
        return cls(max(0.0, green_power_w) * slot_length_s / JOULES_PER_KWH)


class EnergySplit(NamedTuple):
    """Outcome of ``energy_cost_split``."""

    cost_dollars: float
    green_kwh: float
    brown_kwh: float


@dataclass(frozen=True)
class SlotLedger:
    """Per-slot accounting of revenue, costs, energy and temperatures.

    ``net_dollars`` always equals revenue minus the three cost terms.
    """

    slot_index: int
    revenue_dollars: float
    energy_cost_dollars: float
    wakeup_cost_dollars: float
    migration_cost_dollars: float
    green_available_kwh: float
    green_used_kwh: float
    brown_used_kwh: float
    it_power_w: float
    total_power_w: float
    cooling_power_w: float
    cop: float
    supply_temp_c: float
    hottest_inlet_c: float | None
    n_active: int
    n_wakeups: int
    n_migrations: int
    net_dollars: float

    def __post_init__(self):
        expected = (
            self.revenue_dollars
            - self.energy_cost_dollars
            - self.wakeup_cost_dollars
            - self.migration_cost_dollars
        )
        if not math.isclose(self.net_dollars, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError(f"ledger identity broken: net={self.net_dollars}, expected {expected}")
        if self.green_used_kwh > self.green_available_kwh + 1e-12:
            raise ValueError("green energy used exceeds green energy available")

    @property
    def energy_kwh(self) -> float:  # noqa: D102
        return self.green_used_kwh + self.brown_used_kwh


def transition_costs(n_wakeups: int, n_migrations: int, cost_model: CostModel) -> float:
    """Wake-up and migration costs of one slot, $."""
    return n_wakeups * cost_model.wakeup_cost + n_migrations * cost_model.migration_cost


def energy_cost_split(
    p_dc_watts: float,
    slot_length_s: float,
    supply: EnergySupply,
    cost_model: CostModel,
) -> EnergySplit:
    """Split the slot's energy into green and brown parts and price it.

    Green energy is drawn first. In ``GREEN_FIRST`` mode only the brown
    remainder is billed; in ``STRICT`` mode every kWh is.

    Raises:
        DomainError: If ``p_dc_watts`` is negative.
    """
    if p_dc_watts < 0:
        raise DomainError(f"datacenter power must be non-negative, got {p_dc_watts}")
    demand_kwh = p_dc_watts * slot_length_s / JOULES_PER_KWH
    green = min(demand_kwh, supply.green_available_kwh)
    brown = demand_kwh - green
    billed = demand_kwh if cost_model.pricing_mode is PricingMode.STRICT else brown
    return EnergySplit(billed * cost_model.energy_price_per_kwh, green, brown)


def net_revenue(  # noqa: PLR0913
    state_t: DatacenterState,
    state_t1: DatacenterState,
    allocations: Sequence[float] | np.ndarray,
    power: PowerReading,
    supply: EnergySupply,
    cost_model: CostModel,
    revenue_factors: Sequence[float] | np.ndarray | None = None,
) -> SlotLedger:
    """Net revenue of moving from ``state_t`` to ``state_t1`` and serving one slot.

    Revenue is summed over VMs (optionally scaled per VM by ``revenue_factors``,
    which the simulator uses for migration and wake-up delays), then energy,
    wake-up and migration costs are subtracted.

    Args:
        state_t (DatacenterState): State before the plan was applied.
        state_t1 (DatacenterState): Committed state for the slot.
        allocations: Per-VM allocations served during the slot.
        power (PowerReading): Power and thermal reading of ``state_t1``.
        supply (EnergySupply): Green energy available during the slot.
        cost_model (CostModel): Prices.
        revenue_factors: Optional per-VM multipliers in ``[0, 1]``.

    Returns:
        SlotLedger: The populated ledger.

    Raises:
        ConstraintViolationError: If ``state_t1`` with ``allocations`` breaks a constraint.
        DimensionError: If the two states do not describe the same VMs and PMs.
    """
    if state_t.n_vms != state_t1.n_vms or state_t.n_pms != state_t1.n_pms:
        raise DimensionError("states before and after the slot differ in size")
    committed = state_t1.with_allocations(allocations)
    violations = validate_placement(committed)
    if violations:
        raise ConstraintViolationError(violations)

    factors = (
        np.ones(committed.n_vms)
        if revenue_factors is None
        else np.asarray(revenue_factors, dtype=float)
    )
    if factors.shape != (committed.n_vms,):
        raise DimensionError(f"expected {committed.n_vms} revenue factors, got {factors.shape}")

    total_revenue = math.fsum(
        revenue(vm.demand_mips, vm.allocated_mips, vm.app_profile) * float(f)
        for vm, f in zip(committed.vms, factors, strict=True)
    )

    before = state_t.active
    after = committed.active
    n_wakeups = int(np.count_nonzero(after & ~before))
    n_migrations = int(np.count_nonzero(state_t.hosts != committed.hosts))

    split = energy_cost_split(power.total_power_w, committed.slot_length_s, supply, cost_model)
    wakeup_cost = n_wakeups * cost_model.wakeup_cost
    migration_cost = n_migrations * cost_model.migration_cost
    net = total_revenue - split.cost_dollars - wakeup_cost - migration_cost

    return SlotLedger(
        slot_index=committed.slot_index,
        revenue_dollars=total_revenue,
        energy_cost_dollars=split.cost_dollars,
        wakeup_cost_dollars=wakeup_cost,
        migration_cost_dollars=migration_cost,
        green_available_kwh=supply.green_available_kwh,
        green_used_kwh=split.green_kwh,
        brown_used_kwh=split.brown_kwh,
        it_power_w=power.it_power_w,
        total_power_w=power.total_power_w,
        cooling_power_w=power.cooling_power_w,
        cop=power.cop,
        supply_temp_c=power.supply_temp_c,
        hottest_inlet_c=power.hottest_inlet_c,
        n_active=int(np.count_nonzero(after)),
        n_wakeups=n_wakeups,
        n_migrations=n_migrations,
        net_dollars=net,
    )
