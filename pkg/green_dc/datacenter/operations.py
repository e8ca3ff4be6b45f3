import logging
from dataclasses import replace

import numpy as np
from numpy.typing import NDArray

from green_dc.datacenter.entities import (
    ActionPlan,
    DatacenterState,
    Placement,
    TransitionCounts,
    Violation,
)
from green_dc.datacenter.enumerates import ConstraintKind
from green_dc.utils.errors import DimensionError, PlanError


logger = logging.getLogger(__name__)

# Абсолютный допуск (MIPS) при проверке ограничений
CAPACITY_TOLERANCE = 1e-9


def utilization(pm_index: int, state: DatacenterState) -> float:
    """CPU utilization of one PM from the allocations it hosts.

    Args:
        pm_index (int): 0-based PM index.
        state (DatacenterState): Current state.

    Returns:
        float: ``sum(allocated) / capacity`` clamped to ``[0, 1]``; ``0.0`` for a
        sleeping PM.

    Raises:
        IndexError: If ``pm_index`` does not name a PM.
    """
    if not isinstance(pm_index, int | np.integer):
        raise TypeError("The index must be an integer")
    if not 0 <= pm_index < state.n_pms:
        raise IndexError(f"Index {pm_index} outside the range of the PM list")

    pm = state.pms[pm_index]
    if not pm.active:
        return 0.0
    hosted = sum(vm.allocated_mips for vm in state.vms if vm.host == pm_index)
    return min(1.0, max(0.0, hosted / pm.capacity_mips))


def validate_placement(state: DatacenterState) -> list[Violation]:
    """Check the capacity, allocation and range constraints of a state.

    Violations are returned as data; nothing is raised.

    Returns:
        list[Violation]: One record per broken constraint, empty for a feasible state.
    """
    violations: list[Violation] = []
    n = state.n_pms

    for pm in state.pms:
        if not isinstance(pm.active, bool | np.bool_):
            violations.append(
                Violation(ConstraintKind.ACTIVITY, pm=pm.id, message=f"active={pm.active!r}")
            )

    hosted = np.zeros(n)
    for vm in state.vms:
        if not 0 <= vm.host < n:
            violations.append(
                Violation(
                    ConstraintKind.HOST_RANGE,
                    vm=vm.id,
                    message=f"host {vm.host} outside [0, {n - 1}]",
                )
            )
        else:
            hosted[vm.host] += vm.allocated_mips
        if vm.allocated_mips < 0 or vm.allocated_mips > vm.demand_mips + CAPACITY_TOLERANCE:
            violations.append(
                Violation(
                    ConstraintKind.ALLOCATION,
                    pm=vm.host if 0 <= vm.host < n else None,
                    vm=vm.id,
                    message=f"phi={vm.allocated_mips} outside [0, d={vm.demand_mips}]",
                )
            )

    for pm in state.pms:
        limit = pm.capacity_mips * (1.0 if pm.active else 0.0)
        if hosted[pm.id] > limit + CAPACITY_TOLERANCE * max(1.0, pm.capacity_mips):
            violations.append(
                Violation(
                    ConstraintKind.CAPACITY,
                    pm=pm.id,
                    message=f"sum(phi)={hosted[pm.id]} > capacity*a={limit}",
                )
            )
    return violations


def allocate_capacity(state: DatacenterState, placement: Placement) -> NDArray[np.float64]:
    """Proportional-fair allocation of PM capacity to the VMs it hosts.

    Underloaded PMs grant every demand in full. An oversubscribed PM scales all
    of its VMs by ``capacity / total_demand``. VMs on sleeping PMs get nothing.

    Args:
        state (DatacenterState): Supplies demands, capacities and activity.
        placement (Placement): Assignment to allocate for.

    Returns:
        NDArray[np.float64]: Allocation per VM, MIPS.
    """
    if len(placement) != state.n_vms:
        raise DimensionError(f"placement has {len(placement)} entries, expected {state.n_vms}")
    hosts = placement.as_array()
    demands = state.demands
    capacities = state.capacities

    load = np.zeros(state.n_pms)
    np.add.at(load, hosts, demands)
    scale = np.ones(state.n_pms)
    over = load > capacities
    scale[over] = capacities[over] / load[over]
    scale[~state.active] = 0.0
    return demands * scale[hosts]


def apply_plan(
    state: DatacenterState, plan: ActionPlan
) -> tuple[DatacenterState, TransitionCounts]:
    """Commit an action plan: move VMs, wake and sleep PMs.

    Allocations of the returned state are reset to zero; ``allocate_capacity``
    fills them in for the new placement.

    Returns:
        tuple[DatacenterState, TransitionCounts]: The new state and the number
        of wakeups and migrations it took.

    Raises:
        PlanError: If the plan targets unknown PMs, moves VMs onto PMs that stay
            asleep, sleeps a loaded PM or both wakes and sleeps a PM.
    """
    placement = plan.new_placement
    if len(placement) != state.n_vms:
        raise PlanError(
            f"plan places {len(placement)} VMs, state has {state.n_vms}",
        )
    n = state.n_pms
    bad_hosts = [j for j, h in enumerate(placement) if not 0 <= h < n]
    if bad_hosts:
        raise PlanError("plan assigns VMs to unknown PMs", vms=bad_hosts)
    unknown = [i for i in plan.wakeups | plan.sleeps if not 0 <= i < n]
    if unknown:
        raise PlanError("plan wakes or sleeps unknown PMs", pms=unknown)
    both = plan.wakeups & plan.sleeps
    if both:
        raise PlanError("plan both wakes and sleeps the same PMs", pms=both)

    was_active = state.active
    will_be_active = was_active.copy()
    will_be_active[list(plan.wakeups)] = True
    will_be_active[list(plan.sleeps)] = False

    stranded = [j for j, h in enumerate(placement) if not will_be_active[h]]
    if stranded:
        raise PlanError(
            "plan moves VMs onto PMs that are neither active nor woken",
            pms={placement[j] for j in stranded},
            vms=stranded,
        )

    migrated = frozenset(plan.migrated_vms(state))
    woken = frozenset(int(i) for i in np.flatnonzero(will_be_active & ~was_active))

    pms = tuple(replace(pm, active=bool(will_be_active[pm.id])) for pm in state.pms)
    vms = tuple(
        replace(vm, host=placement[vm.id], allocated_mips=0.0) for vm in state.vms
    )
    counts = TransitionCounts(len(woken), len(migrated), woken, migrated)
    logger.debug(
        "slot %d: plan applied, %d wakeups, %d sleeps, %d migrations",
        state.slot_index,
        counts.n_wakeups,
        len(plan.sleeps),
        counts.n_migrations,
    )
    return replace(state, pms=pms, vms=vms), counts


def plan_from_placement(state: DatacenterState, placement: Placement) -> ActionPlan:
    """Derive wakeups and sleeps from a target placement.

    PMs that host at least one VM under ``placement`` must be active; active PMs
    left without VMs are put to sleep in the same slot.
    """
    hosts = placement.as_array()
    loaded = np.zeros(state.n_pms, dtype=bool)
    loaded[hosts] = True
    active = state.active
    wakeups = frozenset(int(i) for i in np.flatnonzero(loaded & ~active))
    sleeps = frozenset(int(i) for i in np.flatnonzero(~loaded & active))
    return ActionPlan(placement, wakeups, sleeps)
