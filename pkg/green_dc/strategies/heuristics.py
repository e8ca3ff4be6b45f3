"""Threshold heuristics: dynamic load balancing and dynamic VM consolidation.

Both work on demanded load (sum of VM demands over PM capacity) so that an
oversubscribed PM is recognised as such even though its utilization is capped
at one.
"""

import logging

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from green_dc.datacenter import ActionPlan, DatacenterState, Placement, plan_from_placement


logger = logging.getLogger(__name__)


class ThresholdConfig(BaseModel):
    """Utilization thresholds of the heuristics.

    Attributes:
        upper_util (float): Overload trigger; destinations are never filled above it.
        lower_util (float): Under-load trigger for consolidation.
    """

    model_config = ConfigDict(frozen=True)

    upper_util: float = Field(0.85, gt=0, le=1)
    lower_util: float = Field(0.30, gt=0, lt=1)

    @model_validator(mode="after")
    def _check_order(self) -> "ThresholdConfig":
        if not self.lower_util < self.upper_util:
            raise ValueError(
                f"lower_util ({self.lower_util}) must be below upper_util ({self.upper_util})"
            )
        return self


def _vms_by_demand(hosts: NDArray, demands: NDArray, pm: int) -> list[int]:
    """VMs of ``pm`` ordered by decreasing demand, ties by index."""
    hosted = np.flatnonzero(hosts == pm)
    order = np.argsort(-demands[hosted], kind="stable")
    return [int(j) for j in hosted[order]]


def dlb_step(state: DatacenterState, thresholds: ThresholdConfig) -> ActionPlan:
    """Dynamic load balancing plan for the next slot.

    Every PM is kept active (sleeping ones are woken). VMs of a PM loaded above
    ``upper_util`` are moved largest-first to the least loaded PM that stays
    within ``upper_util`` after the move, until the source drops to the
    threshold or no VM can be moved.

    Args:
        state (DatacenterState): Current state with this slot's demands.
        thresholds (ThresholdConfig): Utilization thresholds.

    Returns:
        ActionPlan: Plan without sleeps.
    """
    hosts = state.hosts.copy()
    demands = state.demands
    capacities = state.capacities
    load = state.demand_load()

    for source in np.argsort(-load / capacities, kind="stable"):
        source = int(source)
        if load[source] / capacities[source] <= thresholds.upper_util:
            continue
        for vm in _vms_by_demand(hosts, demands, source):
            if load[source] / capacities[source] <= thresholds.upper_util:
                break
            ratio_after = (load + demands[vm]) / capacities
            candidates = [
                pm
                for pm in np.argsort(load / capacities, kind="stable")
                if pm != source and ratio_after[pm] <= thresholds.upper_util
            ]
            if not candidates:
                continue
            target = int(candidates[0])
            hosts[vm] = target
            load[source] -= demands[vm]
            load[target] += demands[vm]
            logger.debug("dlb: VM %d moved PM %d -> PM %d", vm, source, target)

    wakeups = frozenset(int(i) for i in np.flatnonzero(~state.active))
    return ActionPlan(Placement.from_array(hosts), wakeups, frozenset())


def _most_loaded_fit(
    load: NDArray, capacities: NDArray, usable: NDArray, demand: float, upper: float
) -> int | None:
    """Most loaded usable PM that stays within ``upper`` after taking ``demand``."""
    ratio = load / capacities
    for pm in np.argsort(-ratio, kind="stable"):
        if usable[pm] and (load[pm] + demand) / capacities[pm] <= upper:
            return int(pm)
    return None


def dvmc_step(state: DatacenterState, thresholds: ThresholdConfig) -> ActionPlan:  # noqa: C901
    """Dynamic VM consolidation plan for the next slot.

    1. Overloaded PMs shed VMs largest-first onto the most loaded active PM with
       room; a sleeping PM is woken only when no active one fits.
    2. Active PMs loaded below ``lower_util`` (least loaded first) are vacated by
       first-fit-decreasing onto the most loaded other PMs, but only if all of
       their VMs fit within ``upper_util``.
    3. Active PMs left without VMs are put to sleep.

    Args:
        state (DatacenterState): Current state with this slot's demands.
        thresholds (ThresholdConfig): Utilization thresholds.

    Returns:
        ActionPlan: Consolidation plan; no change if nothing triggers.
    """
    upper, lower = thresholds.upper_util, thresholds.lower_util
    hosts = state.hosts.copy()
    demands = state.demands
    capacities = state.capacities
    active = state.active.copy()
    load = state.demand_load()

    for source in np.argsort(-load / capacities, kind="stable"):
        source = int(source)
        if not active[source] or load[source] / capacities[source] <= upper:
            continue
        for vm in _vms_by_demand(hosts, demands, source):
            if load[source] / capacities[source] <= upper:
                break
            usable = active.copy()
            usable[source] = False
            target = _most_loaded_fit(load, capacities, usable, demands[vm], upper)
            if target is None:
                sleeping = [
                    int(pm)
                    for pm in np.flatnonzero(~active)
                    if demands[vm] / capacities[pm] <= upper
                ]
                if not sleeping:
                    continue
                target = sleeping[0]
                active[target] = True
                logger.debug("dvmc: PM %d woken to relieve PM %d", target, source)
            hosts[vm] = target
            load[source] -= demands[vm]
            load[target] += demands[vm]

    vacated = np.zeros(state.n_pms, dtype=bool)
    for source in np.argsort(load / capacities, kind="stable"):
        source = int(source)
        ratio = load[source] / capacities[source]
        if not active[source] or not 0 < ratio < lower:
            continue
        trial_load = load.copy()
        moves: dict[int, int] = {}
        usable = active & ~vacated
        usable[source] = False
        for vm in _vms_by_demand(hosts, demands, source):
            target = _most_loaded_fit(trial_load, capacities, usable, demands[vm], upper)
            if target is None:
                moves = {}
                break
            moves[vm] = target
            trial_load[source] -= demands[vm]
            trial_load[target] += demands[vm]
        if not moves:
            continue
        for vm, target in moves.items():
            hosts[vm] = target
        load = trial_load
        vacated[source] = True
        logger.debug("dvmc: PM %d vacated (%d VMs)", source, len(moves))

    return plan_from_placement(state, Placement.from_array(hosts))
