from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from green_dc.datacenter.enumerates import ConstraintKind
from green_dc.energy.revenue import APP1, RevenueFunction
from green_dc.utils.errors import DimensionError


@dataclass(frozen=True)
class PhysicalMachine:
    """A server hosting virtual machines.

    Attributes:
        id (int): 0-based machine index.
        capacity_mips (float): CPU capacity, MIPS.
        p_max_watts (float): Power at full utilization, W.
        idle_ratio (float): Idle power as a fraction of ``p_max_watts``.
        active (bool): ``True`` while the machine is awake.
    """

    id: int
    capacity_mips: float = 1500.0
    p_max_watts: float = 259.0
    idle_ratio: float = 0.66
    active: bool = True

    def __post_init__(self):
        if not self.capacity_mips > 0:
            raise ValueError(f"PM {self.id}: capacity_mips must be positive")
        if not self.p_max_watts > 0:
            raise ValueError(f"PM {self.id}: p_max_watts must be positive")
        if not 0.0 <= self.idle_ratio <= 1.0:
            raise ValueError(f"PM {self.id}: idle_ratio must be within [0, 1]")


@dataclass(frozen=True)
class VirtualMachine:
    """A migratable unit hosting one application.

    Attributes:
        id (int): 0-based VM index.
        demand_mips (float): Demanded capacity in the current slot.
        allocated_mips (float): Capacity actually scheduled.
        host (int): Index of the hosting PM.
        app_profile (RevenueFunction): Revenue model of the hosted application.
    """

    id: int
    demand_mips: float = 0.0
    allocated_mips: float = 0.0
    host: int = 0
    app_profile: RevenueFunction = APP1

    def __post_init__(self):
        if self.demand_mips < 0:
            raise ValueError(f"VM {self.id}: demand_mips must be non-negative")


@dataclass(frozen=True)
class Placement:
    """Assignment vector: ``hosts[j]`` is the PM hosting VM ``j``."""

    hosts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "hosts", tuple(int(h) for h in self.hosts))

    def __len__(self) -> int:
        return len(self.hosts)

    def __getitem__(self, index: int) -> int:
        return self.hosts[index]

    def __iter__(self):
        return iter(self.hosts)

    @classmethod
    def from_array(cls, hosts: ArrayLike) -> "Placement":  # noqa: D102
        return cls(tuple(np.asarray(hosts, dtype=int).tolist()))

    @classmethod
    def round_robin(cls, n_vms: int, n_pms: int) -> "Placement":
        """VM ``j`` goes to PM ``j mod n_pms``."""
        return cls(tuple(j % n_pms for j in range(n_vms)))

    def as_array(self) -> NDArray[np.int64]:  # noqa: D102
        return np.asarray(self.hosts, dtype=np.int64)


@dataclass(frozen=True)
class Violation:
    """One broken placement constraint.

    Attributes:
        kind (ConstraintKind): Which constraint is broken.
        pm (int | None): Offending PM index, if any.
        vm (int | None): Offending VM index, if any.
        message (str): Human readable detail.
    """

    kind: ConstraintKind
    pm: int | None = None
    vm: int | None = None
    message: str = ""

    def __str__(self) -> str:
        target = []
        if self.pm is not None:
            target.append(f"pm={self.pm}")
        if self.vm is not None:
            target.append(f"vm={self.vm}")
        return f"{self.kind.value}[{', '.join(target)}]: {self.message}"


@dataclass(frozen=True)
class DatacenterState:
    """Immutable snapshot of machines, VMs and the current time slot.

    Attributes:
        pms (tuple[PhysicalMachine, ...]): Machines, indexed by ``id``.
        vms (tuple[VirtualMachine, ...]): VMs, indexed by ``id``.
        slot_index (int): Current time slot ``t``.
        slot_length_s (float): Slot length ``tau`` in seconds.
    """

    pms: tuple[PhysicalMachine, ...]
    vms: tuple[VirtualMachine, ...]
    slot_index: int = 0
    slot_length_s: float = 3600.0

    def __post_init__(self):
        object.__setattr__(self, "pms", tuple(self.pms))
        object.__setattr__(self, "vms", tuple(self.vms))
        if not self.slot_length_s > 0:
            raise ValueError("slot_length_s must be positive")

    @property
    def n_pms(self) -> int:  # noqa: D102
        return len(self.pms)

    @property
    def n_vms(self) -> int:  # noqa: D102
        return len(self.vms)

    @property
    def placement(self) -> Placement:  # noqa: D102
        return Placement(tuple(vm.host for vm in self.vms))

    @property
    def hosts(self) -> NDArray[np.int64]:  # noqa: D102
        return np.fromiter((vm.host for vm in self.vms), dtype=np.int64, count=self.n_vms)

    @property
    def active(self) -> NDArray[np.bool_]:  # noqa: D102
        return np.fromiter((pm.active for pm in self.pms), dtype=bool, count=self.n_pms)

    @property
    def capacities(self) -> NDArray[np.float64]:  # noqa: D102
        return np.fromiter((pm.capacity_mips for pm in self.pms), dtype=float, count=self.n_pms)

    @property
    def demands(self) -> NDArray[np.float64]:  # noqa: D102
        return np.fromiter((vm.demand_mips for vm in self.vms), dtype=float, count=self.n_vms)

    @property
    def allocations(self) -> NDArray[np.float64]:  # noqa: D102
        return np.fromiter((vm.allocated_mips for vm in self.vms), dtype=float, count=self.n_vms)

    @property
    def active_count(self) -> int:  # noqa: D102
        return sum(pm.active for pm in self.pms)

    def demand_load(self) -> NDArray[np.float64]:
        """Demanded MIPS per PM under the current placement (not clamped)."""
        load = np.zeros(self.n_pms)
        np.add.at(load, self.hosts, self.demands)
        return load

    def with_demands(self, demands: ArrayLike, slot_index: int | None = None) -> "DatacenterState":
        """Copy of the state with new per-VM demands (and optionally a new slot index)."""
        values = np.asarray(demands, dtype=float)
        if values.shape != (self.n_vms,):
            raise DimensionError(f"expected {self.n_vms} demands, got shape {values.shape}")
        vms = tuple(
            replace(vm, demand_mips=float(d)) for vm, d in zip(self.vms, values, strict=True)
        )
        slot = self.slot_index if slot_index is None else slot_index
        return replace(self, vms=vms, slot_index=slot)

    def with_allocations(self, allocations: ArrayLike) -> "DatacenterState":
        """Copy of the state with the given per-VM allocations committed."""
        values = np.asarray(allocations, dtype=float)
        if values.shape != (self.n_vms,):
            raise DimensionError(f"expected {self.n_vms} allocations, got shape {values.shape}")
        vms = tuple(
            replace(vm, allocated_mips=float(a)) for vm, a in zip(self.vms, values, strict=True)
        )
        return replace(self, vms=vms)

    @classmethod
    def build(  # noqa: PLR0913
        cls,
        n_pms: int,
        n_vms: int,
        profiles: Sequence[RevenueFunction] = (APP1,),
        capacity_mips: float = 1500.0,
        p_max_watts: float = 259.0,
        idle_ratio: float = 0.66,
        slot_length_s: float = 3600.0,
        demands: Iterable[float] | None = None,
    ) -> "DatacenterState":
        """Homogeneous datacenter with all PMs active and VMs placed round-robin.

        Application profiles are cycled over the VMs.
        """
        pms = tuple(
            PhysicalMachine(i, capacity_mips, p_max_watts, idle_ratio, True) for i in range(n_pms)
        )
        demand_values = list(demands) if demands is not None else [0.0] * n_vms
        if len(demand_values) != n_vms:
            raise DimensionError(f"expected {n_vms} demands, got {len(demand_values)}")
        placement = Placement.round_robin(n_vms, n_pms)
        vms = tuple(
            VirtualMachine(
                id=j,
                demand_mips=float(demand_values[j]),
                allocated_mips=0.0,
                host=placement[j],
                app_profile=profiles[j % len(profiles)],
            )
            for j in range(n_vms)
        )
        return cls(pms, vms, 0, slot_length_s)


@dataclass(frozen=True)
class ActionPlan:
    """What a strategy wants the datacenter to look like in the next slot.

    Attributes:
        new_placement (Placement): Target assignment vector.
        wakeups (frozenset[int]): PMs to activate.
        sleeps (frozenset[int]): PMs to deactivate.
    """

    new_placement: Placement
    wakeups: frozenset[int] = field(default_factory=frozenset)
    sleeps: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "wakeups", frozenset(int(i) for i in self.wakeups))
        object.__setattr__(self, "sleeps", frozenset(int(i) for i in self.sleeps))

    @classmethod
    def keep(cls, state: DatacenterState) -> "ActionPlan":
        """The identity plan: same placement, no activity changes."""
        return cls(state.placement)

    def is_noop(self, state: DatacenterState) -> bool:
        """``True`` if applying the plan changes neither placement nor activity."""
        if self.new_placement != state.placement:
            return False
        active = state.active
        return all(active[i] for i in self.wakeups) and not any(active[i] for i in self.sleeps)

    def migrated_vms(self, state: DatacenterState) -> list[int]:
        """VM indices whose host differs from the one in ``state``."""
        return [
            j
            for j, (old, new) in enumerate(zip(state.placement, self.new_placement, strict=True))
            if old != new
        ]


@dataclass(frozen=True)
class TransitionCounts:
    """Transitions incurred by applying a plan.

    Attributes:
        n_wakeups (int): PMs switched from sleeping to active.
        n_migrations (int): VMs whose host changed.
        woken_pms (frozenset[int]): The switched-on PMs.
        migrated_vms (frozenset[int]): The moved VMs.
    """

    n_wakeups: int = 0
    n_migrations: int = 0
    woken_pms: frozenset[int] = field(default_factory=frozenset)
    migrated_vms: frozenset[int] = field(default_factory=frozenset)
