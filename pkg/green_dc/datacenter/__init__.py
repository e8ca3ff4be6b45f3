from __future__ import annotations

from green_dc.datacenter.entities import (
    ActionPlan,
    DatacenterState,
    PhysicalMachine,
    Placement,
    TransitionCounts,
    VirtualMachine,
    Violation,
)
from green_dc.datacenter.enumerates import ConstraintKind
from green_dc.datacenter.operations import (
    allocate_capacity,
    apply_plan,
    plan_from_placement,
    utilization,
    validate_placement,
)


__all__ = [
    "ActionPlan",
    "ConstraintKind",
    "DatacenterState",
    "PhysicalMachine",
    "Placement",
    "TransitionCounts",
    "VirtualMachine",
    "Violation",
    "allocate_capacity",
    "apply_plan",
    "plan_from_placement",
    "utilization",
    "validate_placement",
]
