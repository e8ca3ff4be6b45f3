from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from green_dc.utils.errors import DomainError


class PowerModel(BaseModel):
    """Linear utilization-to-power model of one physical machine.

    Attributes:
        p_max_watts (float): Power at full utilization, W.
        idle_ratio (float): Idle power as a fraction of ``p_max_watts``.
        sleep_power_w (float): Power drawn while the machine sleeps, W.
    """

    model_config = ConfigDict(frozen=True)

    p_max_watts: float = Field(259.0, gt=0)
    idle_ratio: float = Field(0.66, ge=0, le=1)
    sleep_power_w: float = Field(0.0, ge=0)


def pm_power(theta: float, model: PowerModel) -> float:
    """Return the power drawn by an active PM at CPU utilization ``theta``.

    Sleeping machines are not handled here; the caller uses
    ``model.sleep_power_w`` for them.

    Args:
        theta (float): CPU utilization in ``[0, 1]``.
        model (PowerModel): Machine power parameters.

    Returns:
        float: ``p_max * (c + (1 - c) * theta)`` in watts.

    Raises:
        DomainError: If ``theta`` lies outside ``[0, 1]``.
    """
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"utilization must be within [0, 1], got {theta}")
    c = model.idle_ratio
    return model.p_max_watts * (c + (1.0 - c) * theta)


def pm_powers(
    theta: ArrayLike,
    active: ArrayLike,
    p_max_watts: ArrayLike,
    idle_ratio: ArrayLike,
    sleep_power_w: float = 0.0,
) -> NDArray[np.float64]:
    """Vectorised ``pm_power`` over machines (and optionally over a batch axis).

    Args:
        theta: Utilizations, shape ``(..., N)``; values are clipped to ``[0, 1]``.
        active: Activity flags broadcastable to ``theta``.
        p_max_watts: Per-machine maximum power, shape ``(N,)``.
        idle_ratio: Per-machine idle ratio, shape ``(N,)``.
        sleep_power_w (float): Power of a sleeping machine.

    Returns:
        NDArray[np.float64]: Power per machine with the shape of ``theta``.
    """
    theta = np.clip(np.asarray(theta, dtype=float), 0.0, 1.0)
    c = np.asarray(idle_ratio, dtype=float)
    busy = np.asarray(p_max_watts, dtype=float) * (c + (1.0 - c) * theta)
    return np.where(np.asarray(active, dtype=bool), busy, sleep_power_w)


@dataclass(frozen=True)
class PowerReading:
    """Electrical and thermal state of the datacenter for one slot.

    Attributes:
        pm_powers_w (tuple[float, ...]): Power per machine, W.
        it_power_w (float): Sum of machine powers, W.
        total_power_w (float): IT plus cooling power, W.
        cooling_power_w (float): Cooling share of ``total_power_w``, W.
        hottest_inlet_c (float | None): Hottest inlet temperature among active machines.
        supply_temp_c (float): Supply temperature the CoP was evaluated at, °C.
        cop (float): Coefficient of performance of the cooling plant.
    """

    pm_powers_w: tuple[float, ...]
    it_power_w: float
    total_power_w: float
    cooling_power_w: float
    hottest_inlet_c: float | None
    supply_temp_c: float
    cop: float
