"""Exogenous inputs of a run: VM demand, solar generation and outside temperature."""

from dataclasses import dataclass, field
import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from green_dc.simulation.scenario import Scenario
from green_dc.utils.errors import DimensionError, DomainError


logger = logging.getLogger(__name__)

# Часы пиков нагрузки и их ширина
DEMAND_PEAK_HOURS = (10.0, 20.0)
DEMAND_PEAK_WIDTH_H = 3.0
DEMAND_FLOOR = 0.15

# Солнечная генерация строго положительна только между восходом и закатом
SUNRISE_H = 6.0
SUNSET_H = 19.0

COLDEST_H = 4.0


@dataclass(frozen=True)
class SlotTraces:
    """Inputs of a single slot."""

    slot_index: int
    demand_mips: NDArray[np.float64] = field(repr=False)
    solar_w: float
    t_out_c: float


@dataclass(frozen=True)
class TraceSet:
    """Inputs of a whole run.

    Attributes:
        demand (NDArray): ``n_slots x n_vms`` demanded MIPS.
        solar_w (NDArray): Generation per slot, W.
        t_out_c (NDArray): Outside temperature per slot, °C.
        solar_history_w (NDArray): Generation before the first slot, oldest
            first; may be empty.
    """

    demand: NDArray[np.float64] = field(repr=False)
    solar_w: NDArray[np.float64] = field(repr=False)
    t_out_c: NDArray[np.float64] = field(repr=False)
    solar_history_w: NDArray[np.float64] = field(default_factory=lambda: np.empty(0), repr=False)

    def __post_init__(self):
        demand = np.array(self.demand, dtype=float)
        solar = np.array(self.solar_w, dtype=float).ravel()
        t_out = np.array(self.t_out_c, dtype=float).ravel()
        history = np.array(self.solar_history_w, dtype=float).ravel()
        if demand.ndim != 2:  # noqa: PLR2004
            raise DimensionError(f"demand must be a matrix, got shape {demand.shape}")
        n_slots = demand.shape[0]
        if solar.shape != (n_slots,) or t_out.shape != (n_slots,):
            raise DimensionError(
                f"{n_slots} demand slots, {solar.size} solar values, {t_out.size} temperatures"
            )
        if np.any(demand < 0) or np.any(solar < 0) or np.any(history < 0):
            raise DomainError("demand and generation must be non-negative")
        for name, values in (
            ("demand", demand),
            ("solar_w", solar),
            ("t_out_c", t_out),
            ("solar_history_w", history),
        ):
            values.setflags(write=False)
            object.__setattr__(self, name, values)

    @property
    def n_slots(self) -> int:  # noqa: D102
        return self.demand.shape[0]

    @property
    def n_vms(self) -> int:  # noqa: D102
        return self.demand.shape[1]

    def slot(self, t: int) -> SlotTraces:
        """Inputs of slot ``t``."""
        if not 0 <= t < self.n_slots:
            raise IndexError(f"Slot {t} outside the trace range")
        return SlotTraces(t, self.demand[t], float(self.solar_w[t]), float(self.t_out_c[t]))

    def check(self, n_slots: int, n_vms: int) -> None:
        """Raise ``DimensionError`` unless the traces cover ``n_slots`` slots of ``n_vms`` VMs."""
        if self.n_slots < n_slots or self.n_vms != n_vms:
            raise DimensionError(
                f"traces cover {self.n_slots} slots x {self.n_vms} VMs, "
                f"scenario needs {n_slots} x {n_vms}"
            )


def slots_per_day(slot_length_s: float) -> int:  # noqa: D103
    return max(1, round(86400.0 / slot_length_s))


def hour_of_day(slots: ArrayLike, slot_length_s: float) -> NDArray[np.float64]:
    """Hour on the 24-hour clock at which each slot starts."""
    per_day = slots_per_day(slot_length_s)
    return (np.asarray(slots) % per_day) * (24.0 / per_day)


def demand_profile(hours: ArrayLike) -> NDArray[np.float64]:
    """Bimodal diurnal shape with peaks at 10:00 and 20:00, in ``(0, ~1]``."""
    h = np.asarray(hours, dtype=float)
    peaks = sum(
        np.exp(-((h - p) ** 2) / (2 * DEMAND_PEAK_WIDTH_H**2)) for p in DEMAND_PEAK_HOURS
    )
    return DEMAND_FLOOR + (1.0 - DEMAND_FLOOR) * peaks


def solar_profile(hours: ArrayLike, peak_w: float) -> NDArray[np.float64]:
    """Half-sine between sunrise and sunset, zero at night."""
    h = np.asarray(hours, dtype=float)
    day = (h > SUNRISE_H) & (h < SUNSET_H)
    phase = np.pi * (h - SUNRISE_H) / (SUNSET_H - SUNRISE_H)
    return np.where(day, peak_w * np.sin(phase), 0.0)


def temperature_profile(hours: ArrayLike, t_min_c: float, t_max_c: float) -> NDArray[np.float64]:
    """Sinusoid coldest at 04:00 and warmest at 16:00."""
    h = np.asarray(hours, dtype=float)
    mid, amp = (t_min_c + t_max_c) / 2.0, (t_max_c - t_min_c) / 2.0
    return mid - amp * np.cos(2.0 * np.pi * (h - COLDEST_H) / 24.0)


def synthesize_traces(scenario: Scenario, seed: int | None = None) -> TraceSet:
    """Generate deterministic synthetic traces for ``scenario``.

    Per-VM demand is the diurnal profile times uniform noise; every slot is then
    rescaled so the aggregate follows the profile exactly, peaking at
    ``peak_demand_fraction`` of the total capacity. Generation is noisy around
    the half-sine and also synthesised for ``history_days`` before the first slot.

    Args:
        scenario (Scenario): Sizes and trace parameters.
        seed (int | None): Random seed; the scenario seed when omitted.
    """
    seed = scenario.simulation.rng_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    settings, dc, sim = scenario.traces, scenario.datacenter, scenario.simulation
    tau = sim.slot_length_s

    slots = np.arange(sim.n_slots)
    hours = hour_of_day(slots, tau)
    per_day = slots_per_day(tau)

    base = demand_profile(hours)
    reference = demand_profile(hour_of_day(np.arange(per_day), tau)).max()
    aggregate = base / reference * settings.peak_demand_fraction * dc.n_pms * dc.capacity_mips

    noise = rng.uniform(settings.noise_low, settings.noise_high, size=(sim.n_slots, dc.n_vms))
    row_sums = noise.sum(axis=1, keepdims=True)
    uniform = np.full_like(noise, 1.0 / dc.n_vms)
    shares = np.divide(noise, row_sums, out=uniform, where=row_sums > 0)
    demand = np.minimum(shares * aggregate[:, None], dc.capacity_mips)

    n_history = settings.history_days * per_day
    all_slots = np.arange(-n_history, sim.n_slots)
    all_hours = hour_of_day(all_slots, tau)
    solar = solar_profile(all_hours, settings.solar_peak_w)
    if settings.solar_noise > 0:
        solar = solar * (1.0 + rng.uniform(-settings.solar_noise, settings.solar_noise, solar.size))
    solar = np.clip(solar, 0.0, None)

    t_out = temperature_profile(hours, settings.t_out_min_c, settings.t_out_max_c)
    logger.info(
        "synthetic traces: %d slots, %d VMs, %d history slots, seed %d",
        sim.n_slots,
        dc.n_vms,
        n_history,
        seed,
    )
    return TraceSet(demand, solar[n_history:], t_out, solar[:n_history])
