from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from green_dc.energy.enumerates import CoolingBranch
from green_dc.utils.errors import DimensionError, DomainError


# Коэффициенты CRAC-ветви CoP
CRAC_A = 0.0068
CRAC_B = 0.0008
CRAC_C = 0.458


class CoolingModel(BaseModel):
    """Cooling plant made of an air economizer and a CRAC unit.

    Attributes:
        k_econ (float): Economizer factor per degree of outside/supply gap.
        t_sup_c (float): Target supply temperature, °C.
        t_safe_c (float): Safe outlet temperature of the hottest server, °C.
        econ_min_delta_c (float): Smallest supply/outside gap for which the
            economizer branch is used; inside the band the CRAC branch applies.
        adjust_supply (bool): Evaluate CoP at the adjusted supply temperature
            instead of ``t_sup_c``.
    """

    model_config = ConfigDict(frozen=True)

    k_econ: float = Field(0.1, gt=0)
    t_sup_c: float = 25.0
    t_safe_c: float = 35.0
    econ_min_delta_c: float = Field(0.5, gt=0)
    adjust_supply: bool = True


@dataclass(frozen=True)
class ThermalModel:
    """Heat recirculation between machines.

    Attributes:
        d_matrix (NDArray): ``N x N`` heat-transfer matrix, °C per W.
        t_supply_vec (NDArray): Supplied air temperature per machine, °C.
    """

    d_matrix: NDArray[np.float64] = field(repr=False)
    t_supply_vec: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        d = np.array(self.d_matrix, dtype=float)
        t_s = np.array(self.t_supply_vec, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:  # noqa: PLR2004
            raise DimensionError(f"D must be square, got shape {d.shape}")
        if t_s.shape != (d.shape[0],):
            raise DimensionError(
                f"supply temperatures must have {d.shape[0]} entries, got shape {t_s.shape}"
            )
        if np.any(d < 0):
            raise DomainError("D entries must be non-negative")
        d.setflags(write=False)
        t_s.setflags(write=False)
        object.__setattr__(self, "d_matrix", d)
        object.__setattr__(self, "t_supply_vec", t_s)

    @property
    def n_pms(self) -> int:  # noqa: D102
        return self.d_matrix.shape[0]

    @classmethod
    def uniform(cls, d_matrix: ArrayLike, t_supply_c: float = 18.0) -> "ThermalModel":
        """Build a model whose supplied air temperature is the same for every machine."""
        d = np.asarray(d_matrix, dtype=float)
        return cls(d, np.full(d.shape[0], float(t_supply_c)))


def default_d_matrix(n: int, diag: float = 0.015, neighbor: float = 0.003) -> NDArray[np.float64]:
    """Synthetic row layout: self-heating on the diagonal, coupling to index neighbours.

    Args:
        n (int): Number of machines.
        diag (float): Diagonal entry, °C/W.
        neighbor (float): Entry for ``|i - j| == 1``, °C/W.

    Returns:
        NDArray[np.float64]: The ``n x n`` matrix.
    """
    if n <= 0:
        raise DomainError(f"n must be positive, got {n}")
    d = np.eye(n) * diag
    idx = np.arange(n - 1)
    d[idx, idx + 1] = neighbor
    d[idx + 1, idx] = neighbor
    return d


def load_d_matrix(path: str | Path, n: int | None = None) -> NDArray[np.float64]:
    """Read a heat-transfer matrix from a CSV file of ``N`` rows by ``N`` values.

    Raises:
        FileNotFoundError: If the file does not exist.
        DimensionError: If the matrix is not square or not ``n x n``.
        DomainError: If an entry is negative.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл {path} не найден")
    try:
        d = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from exc
    if d.shape[0] != d.shape[1]:
        raise DimensionError(f"{path}: D must be square, got shape {d.shape}")
    if n is not None and d.shape[0] != n:
        raise DimensionError(f"{path}: expected {n}x{n} matrix, got {d.shape}")
    if np.any(d < 0):
        raise DomainError(f"{path}: D entries must be non-negative")
    return d


def cooling_branch(t_sup_effective_c: float, t_out_c: float, model: CoolingModel) -> CoolingBranch:
    """Return which cooling device serves the given temperatures."""
    if t_out_c <= t_sup_effective_c - model.econ_min_delta_c:
        return CoolingBranch.ECONOMIZER
    return CoolingBranch.CRAC


def cop(t_sup_effective_c: float, t_out_c: float, model: CoolingModel) -> float:
    """Coefficient of performance of the cooling plant.

    When the outside air is colder than the supply target by at least
    ``econ_min_delta_c`` the economizer branch ``1 / (k_econ * (t_sup - t_out))`` is
    used, otherwise the CRAC quadratic in the supply temperature.

    Args:
        t_sup_effective_c (float): Supply temperature in effect, °C.
        t_out_c (float): Outside temperature, °C.
        model (CoolingModel): Cooling parameters.

    Returns:
        float: The CoP, always positive.
    """
    if cooling_branch(t_sup_effective_c, t_out_c, model) is CoolingBranch.ECONOMIZER:
        return 1.0 / (model.k_econ * (t_sup_effective_c - t_out_c))
    t = t_sup_effective_c
    return CRAC_A * t * t + CRAC_B * t + CRAC_C


def cop_many(t_sup_effective_c: ArrayLike, t_out_c: float, model: CoolingModel) -> NDArray:
    """Vectorised ``cop`` over supply temperatures."""
    t = np.asarray(t_sup_effective_c, dtype=float)
    gap = t - t_out_c
    econ = gap >= model.econ_min_delta_c
    safe_gap = np.where(econ, gap, 1.0)
    return np.where(econ, 1.0 / (model.k_econ * safe_gap), CRAC_A * t * t + CRAC_B * t + CRAC_C)


def datacenter_power(pm_powers: ArrayLike, cop_value: float) -> float:
    """Total facility power: IT load plus the cooling needed to remove it.

    Raises:
        DomainError: If ``cop_value`` is not positive.
    """
    if not cop_value > 0:
        raise DomainError(f"CoP must be positive, got {cop_value}")
    return (1.0 + 1.0 / cop_value) * float(np.sum(pm_powers))


def inlet_temperatures(thermal_model: ThermalModel, pm_powers: ArrayLike) -> NDArray[np.float64]:
    """Inlet temperature of every machine, ``t_supply_vec + d_matrix @ p``.

    ``pm_powers`` may also be a ``(P, N)`` batch; the result then has the same shape.

    Raises:
        DimensionError: If the last axis of ``pm_powers`` is not ``N`` long.
    """
    p = np.asarray(pm_powers, dtype=float)
    if p.ndim == 0 or p.shape[-1] != thermal_model.n_pms:
        raise DimensionError(
            f"expected {thermal_model.n_pms} machine powers, got shape {p.shape}"
        )
    # einsum keeps every row independent of the batch size
    return thermal_model.t_supply_vec + np.einsum("...j,ij->...i", p, thermal_model.d_matrix)


def adjust_supply_temperature(t_server_hottest_c: float, model: CoolingModel) -> float:
    """Shift the supply temperature by ``t_safe_c - t_hottest``.

    A hottest server above the safe level lowers the supply temperature, a
    cooler one lets the plant supply warmer air.
    """
    return model.t_sup_c + (model.t_safe_c - t_server_hottest_c)
