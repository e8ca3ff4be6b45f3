"""Net-revenue objective of a placement: one slot of revenue minus energy and transition costs.

``measure_power`` evaluates a committed state machine by machine and feeds the
simulator's ledger. ``NetRevenueEvaluator`` computes the same objective for a
whole batch of candidate placements at once and serves as the GA fitness.
"""

from dataclasses import dataclass, field
import logging
import threading

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from green_dc.datacenter import DatacenterState, utilization
from green_dc.energy.economics import JOULES_PER_KWH, CostModel, EnergySupply
from green_dc.energy.enumerates import PricingMode
from green_dc.energy.power import PowerModel, PowerReading, pm_power, pm_powers
from green_dc.energy.revenue import profile_arrays, revenue_many
from green_dc.energy.thermal import (
    CoolingModel,
    ThermalModel,
    adjust_supply_temperature,
    cop,
    cop_many,
    datacenter_power,
    inlet_temperatures,
)
from green_dc.utils.errors import DimensionError


logger = logging.getLogger(__name__)


class TransitionDelays(BaseModel):
    """Service time lost by a VM when it migrates or its PM wakes up.

    Attributes:
        migration_delay_s (float): Lost by a migrated VM, s.
        wakeup_delay_s (float): Lost by every VM on a PM woken in the slot, s.
    """

    model_config = ConfigDict(frozen=True)

    migration_delay_s: float = Field(0.0, ge=0)
    wakeup_delay_s: float = Field(0.0, ge=0)


def revenue_delay_factors(
    migrated: ArrayLike, on_woken: ArrayLike, delays: TransitionDelays, slot_length_s: float
) -> NDArray[np.float64]:
    """Per-VM revenue multipliers for time lost to migration and wake-up.

    A migrated VM serves ``1 - migration_delay / slot_length`` of the slot; a VM
    on a PM woken in this slot is further scaled by
    ``1 - wakeup_delay / slot_length``.

    Args:
        migrated: Boolean mask over VMs, any leading batch shape.
        on_woken: Boolean mask of the same shape.
        delays (TransitionDelays): Lost service times.
        slot_length_s (float): Slot length, s.

    Returns:
        NDArray[np.float64]: Multipliers with the shape of the masks.
    """
    moved = np.asarray(migrated, dtype=bool)
    woken = np.asarray(on_woken, dtype=bool)
    if moved.shape != woken.shape:
        raise DimensionError(f"masks differ in shape: {moved.shape} vs {woken.shape}")
    migration = 1.0 - delays.migration_delay_s / slot_length_s
    wakeup = 1.0 - delays.wakeup_delay_s / slot_length_s
    return np.where(moved, migration, 1.0) * np.where(woken, wakeup, 1.0)


@dataclass(frozen=True)
class ModelBundle:
    """Physical and economic models shared by the strategies and the simulator.

    Attributes:
        power (PowerModel): Power template; ``sleep_power_w`` applies to every PM.
        cooling (CoolingModel): Cooling plant.
        thermal (ThermalModel): Heat recirculation between machines.
        costs (CostModel): Prices.
        delays (TransitionDelays): Service lost to transitions; zero by default.
    """

    power: PowerModel
    cooling: CoolingModel
    thermal: ThermalModel
    costs: CostModel
    delays: TransitionDelays = field(default_factory=TransitionDelays)


def effective_supply_temperature(hottest_inlet_c: float | None, cooling: CoolingModel) -> float:
    """Supply temperature the CoP is evaluated at.

    Falls back to the target supply temperature when adjustment is disabled or
    no machine is active.
    """
    if hottest_inlet_c is None or not cooling.adjust_supply:
        return cooling.t_sup_c
    return adjust_supply_temperature(hottest_inlet_c, cooling)


def measure_power(state: DatacenterState, models: ModelBundle, t_out_c: float) -> PowerReading:
    """Evaluate machine power, inlet temperatures, CoP and facility power of a state.

    Machine utilization comes from the committed allocations of ``state``.
    """
    if models.thermal.n_pms != state.n_pms:
        raise DimensionError(
            f"thermal model covers {models.thermal.n_pms} PMs, state has {state.n_pms}"
        )
    powers = np.empty(state.n_pms)
    for pm in state.pms:
        if not pm.active:
            powers[pm.id] = models.power.sleep_power_w
            continue
        model = PowerModel(
            p_max_watts=pm.p_max_watts,
            idle_ratio=pm.idle_ratio,
            sleep_power_w=models.power.sleep_power_w,
        )
        powers[pm.id] = pm_power(utilization(pm.id, state), model)

    t_in = inlet_temperatures(models.thermal, powers)
    active = state.active
    hottest = float(t_in[active].max()) if active.any() else None
    supply_c = effective_supply_temperature(hottest, models.cooling)
    cop_value = cop(supply_c, t_out_c, models.cooling)
    total = datacenter_power(powers, cop_value)
    it_power = float(np.sum(powers))

    return PowerReading(
        pm_powers_w=tuple(float(p) for p in powers),
        it_power_w=it_power,
        total_power_w=total,
        cooling_power_w=total - it_power,
        hottest_inlet_c=hottest,
        supply_temp_c=supply_c,
        cop=cop_value,
    )


class NetRevenueEvaluator:
    """Batch evaluation of the one-slot objective over candidate placements.

    A candidate's PM is considered active iff it hosts at least one VM. Wake-up
    costs are counted against the real activity of ``state`` and migrations
    against its placement. Demands are taken from ``state``. With
    ``apply_delays`` the revenue of migrated VMs and of VMs on woken PMs is
    scaled by ``revenue_delay_factors``, as the simulator bills it.

    Typical usage:
        evaluator = NetRevenueEvaluator(state, models, t_out_c=22.0, supply=supply)
        fitness = evaluator(population)  # population: (P, M) int array
    """

    def __init__(
        self,
        state: DatacenterState,
        models: ModelBundle,
        t_out_c: float,
        supply: EnergySupply,
        apply_delays: bool = True,
    ):
        """Capture everything the objective needs from ``state`` as arrays.

        Args:
            state (DatacenterState): Current state; demands must already be updated.
            models (ModelBundle): Physical and economic models.
            t_out_c (float): Outside temperature for the slot, °C.
            supply (EnergySupply): (Forecast) green energy for the slot.
            apply_delays (bool): Charge ``models.delays`` against revenue.
        """
        if models.thermal.n_pms != state.n_pms:
            raise DimensionError(
                f"thermal model covers {models.thermal.n_pms} PMs, state has {state.n_pms}"
            )
        self._n_pms = state.n_pms
        self._n_vms = state.n_vms
        self._capacities = state.capacities
        self._p_max = np.array([pm.p_max_watts for pm in state.pms], dtype=float)
        self._idle = np.array([pm.idle_ratio for pm in state.pms], dtype=float)
        self._demands = state.demands
        self._lower, self._upper, self._u_max = profile_arrays([vm.app_profile for vm in state.vms])
        self._hosts = state.hosts
        self._active = state.active
        self._slot_length_s = state.slot_length_s
        self._models = models
        self._t_out_c = float(t_out_c)
        self._green_kwh = supply.green_available_kwh
        self._delays = models.delays if apply_delays else TransitionDelays()
        self._lock = threading.Lock()
        self.evaluations = 0

    @property
    def n_pms(self) -> int:  # noqa: D102
        return self._n_pms

    @property
    def n_vms(self) -> int:  # noqa: D102
        return self._n_vms

    def __call__(self, population: ArrayLike) -> NDArray[np.float64]:
        return self.evaluate(population)

    def loads(self, population: NDArray[np.int64]) -> NDArray[np.float64]:
        """Demanded MIPS per PM for every candidate, shape ``(P, N)``."""
        p = population.shape[0]
        offsets = (np.arange(p) * self._n_pms)[:, None]
        flat = (population + offsets).ravel()
        weights = np.broadcast_to(self._demands, population.shape).ravel()
        return np.bincount(flat, weights=weights, minlength=p * self._n_pms).reshape(
            p, self._n_pms
        )

    def evaluate(self, population: ArrayLike) -> NDArray[np.float64]:
        """Objective value of each candidate placement.

        Args:
            population: ``(P, M)`` or ``(M,)`` array of PM indices.

        Returns:
            NDArray[np.float64]: ``(P,)`` net revenue in dollars.
        """
        pop = np.atleast_2d(np.asarray(population, dtype=np.int64))
        if pop.shape[1] != self._n_vms:
            raise DimensionError(f"genomes must have {self._n_vms} genes, got {pop.shape[1]}")
        if pop.size and (pop.min() < 0 or pop.max() >= self._n_pms):
            raise DimensionError(f"genes must lie in [0, {self._n_pms - 1}]")
        with self._lock:
            self.evaluations += pop.shape[0]

        p = pop.shape[0]
        offsets = (np.arange(p) * self._n_pms)[:, None]
        flat = (pop + offsets).ravel()
        load = self.loads(pop)
        active = np.bincount(flat, minlength=p * self._n_pms).reshape(p, self._n_pms) > 0

        # пропорциональное деление мощности при переподписке
        safe_load = np.where(load > 0, load, 1.0)
        scale = np.where(load > self._capacities, self._capacities / safe_load, 1.0)
        allocations = self._demands * np.take_along_axis(scale, pop, axis=1)
        woken = active & ~self._active
        migrated = pop != self._hosts
        factors = revenue_delay_factors(
            migrated, np.take_along_axis(woken, pop, axis=1), self._delays, self._slot_length_s
        )
        revenue = (
            revenue_many(self._demands, allocations, self._lower, self._upper, self._u_max)
            * factors
        ).sum(axis=1)

        theta = np.minimum(load, self._capacities) / self._capacities
        powers = pm_powers(
            theta, active, self._p_max, self._idle, self._models.power.sleep_power_w
        )
        t_in = inlet_temperatures(self._models.thermal, powers)
        cooling = self._models.cooling
        any_active = active.any(axis=1)
        hottest = np.where(active, t_in, -np.inf).max(axis=1)
        if cooling.adjust_supply:
            supply_c = np.where(
                any_active, cooling.t_sup_c + (cooling.t_safe_c - hottest), cooling.t_sup_c
            )
        else:
            supply_c = np.full(p, cooling.t_sup_c)
        cop_values = cop_many(supply_c, self._t_out_c, cooling)
        p_dc = (1.0 + 1.0 / cop_values) * powers.sum(axis=1)

        costs = self._models.costs
        energy_kwh = p_dc * self._slot_length_s / JOULES_PER_KWH
        brown_kwh = energy_kwh - np.minimum(energy_kwh, self._green_kwh)
        billed = energy_kwh if costs.pricing_mode is PricingMode.STRICT else brown_kwh
        energy_cost = billed * costs.energy_price_per_kwh

        wakeups = np.count_nonzero(woken, axis=1)
        migrations = np.count_nonzero(migrated, axis=1)
        transition = wakeups * costs.wakeup_cost + migrations * costs.migration_cost

        return revenue - energy_cost - transition
