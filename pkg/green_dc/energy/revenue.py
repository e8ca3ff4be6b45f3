import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from green_dc.utils.errors import DomainError


# Допуск на ошибки округления при сравнении выделенной и запрошенной мощности
ALLOCATION_TOLERANCE = 1e-9


class RevenueFunction(BaseModel):
    """Elastic per-slot revenue of one hosted application.

    Revenue is zero up to ``lower_pct`` percent of the demand being served,
    rises linearly and saturates at ``u_max_dollars`` from ``upper_pct`` on.

    Attributes:
        lower_pct (float): Satisfaction percentage where revenue starts.
        upper_pct (float): Satisfaction percentage where revenue saturates.
        u_max_dollars (float): Revenue ceiling per slot, $.
    """

    model_config = ConfigDict(frozen=True)

    lower_pct: float = Field(ge=0, le=100)
    upper_pct: float = Field(ge=0, le=100)
    u_max_dollars: float = Field(ge=0)

    @model_validator(mode="after")
    def _check_bounds(self) -> "RevenueFunction":
        if not self.lower_pct < self.upper_pct:
            raise ValueError(
                f"lower_pct ({self.lower_pct}) must be below upper_pct ({self.upper_pct})"
            )
        return self

    def __call__(self, demand_mips: float, allocated_mips: float) -> float:  # noqa: D102
        return revenue(demand_mips, allocated_mips, self)

    def to_text(self) -> str:
        """Serialise as ``lower:upper:u_max``."""
        return f"{self.lower_pct!r}:{self.upper_pct!r}:{self.u_max_dollars!r}"

    @classmethod
    def from_text(cls, text: str) -> "RevenueFunction":
        """Parse the ``lower:upper:u_max`` form produced by ``to_text``."""
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:  # noqa: PLR2004
            raise ValueError(f"expected 'lower:upper:u_max', got {text!r}")
        lower, upper, u_max = parts
        return cls(lower_pct=lower, upper_pct=upper, u_max_dollars=u_max)


APP1 = RevenueFunction(lower_pct=50, upper_pct=90, u_max_dollars=100)
APP2 = RevenueFunction(lower_pct=40, upper_pct=60, u_max_dollars=60)
APP3 = RevenueFunction(lower_pct=30, upper_pct=70, u_max_dollars=80)

# Профили приложений, назначаются виртуальным машинам по кругу
DEFAULT_PROFILES: tuple[RevenueFunction, ...] = (APP1, APP2, APP3)


def revenue(demand_mips: float, allocated_mips: float, fn: RevenueFunction) -> float:
    """Revenue earned in one slot by serving ``allocated_mips`` of ``demand_mips``.

    Args:
        demand_mips (float): Demanded capacity. Zero demand is trivially satisfied.
        allocated_mips (float): Scheduled capacity, ``0 <= allocated <= demand``.
        fn (RevenueFunction): The application's profit model.

    Returns:
        float: Dollars for the slot, within ``[0, u_max]``.

    Raises:
        DomainError: If the allocation is negative or exceeds the demand.
    """
    if demand_mips < 0 or allocated_mips < 0:
        raise DomainError(
            f"demand and allocation must be non-negative ({demand_mips}, {allocated_mips})"
        )
    if demand_mips == 0:
        return fn.u_max_dollars
    if allocated_mips > demand_mips * (1.0 + ALLOCATION_TOLERANCE):
        raise DomainError(f"allocation {allocated_mips} exceeds demand {demand_mips}")

    satisfaction = 100.0 * min(allocated_mips, demand_mips) / demand_mips
    if satisfaction <= fn.lower_pct:
        return 0.0
    if satisfaction >= fn.upper_pct:
        return fn.u_max_dollars
    return fn.u_max_dollars * (satisfaction - fn.lower_pct) / (fn.upper_pct - fn.lower_pct)


def profile_arrays(profiles: "list[RevenueFunction] | tuple[RevenueFunction, ...]"):
    """Stack profiles into ``(lower, upper, u_max)`` arrays for ``revenue_many``."""
    lower = np.array([p.lower_pct for p in profiles], dtype=float)
    upper = np.array([p.upper_pct for p in profiles], dtype=float)
    u_max = np.array([p.u_max_dollars for p in profiles], dtype=float)
    return lower, upper, u_max


def revenue_many(
    demand_mips: ArrayLike,
    allocated_mips: ArrayLike,
    lower_pct: ArrayLike,
    upper_pct: ArrayLike,
    u_max_dollars: ArrayLike,
) -> NDArray[np.float64]:
    """Vectorised ``revenue``; all arguments broadcast against each other.

    Used on ``(P, M)`` allocation batches by the placement evaluator.
    """
    d = np.asarray(demand_mips, dtype=float)
    a = np.asarray(allocated_mips, dtype=float)
    lower = np.asarray(lower_pct, dtype=float)
    upper = np.asarray(upper_pct, dtype=float)
    u_max = np.asarray(u_max_dollars, dtype=float)

    safe_d = np.where(d > 0, d, 1.0)
    satisfaction = np.where(d > 0, 100.0 * np.minimum(a, d) / safe_d, 100.0)
    ramp = np.clip((satisfaction - lower) / (upper - lower), 0.0, 1.0)
    return u_max * ramp
