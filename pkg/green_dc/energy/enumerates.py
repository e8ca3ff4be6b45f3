from enum import Enum


class PricingMode(Enum):
    """How the grid price is applied to the energy drawn in a slot.

    Attributes:
        GREEN_FIRST (str): Renewable energy is free and consumed first; only the
            brown remainder is billed.
        STRICT (str): Every kWh is billed at the grid price, as the objective is
            literally written. Green energy is still accounted first.
    """

    GREEN_FIRST = "green_first"
    STRICT = "strict"


class CoolingBranch(Enum):
    """Cooling device that serves a slot.

    Attributes:
        ECONOMIZER (str): Outside air is cold enough for free cooling.
        CRAC (str): Mechanical computer-room air conditioning.
    """

    ECONOMIZER = "economizer"
    CRAC = "crac"
