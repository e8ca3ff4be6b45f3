from enum import Enum


class ConstraintKind(Enum):
    """Placement constraints checked by ``validate_placement``.

    Attributes:
        CAPACITY (str): Hosted allocations exceed ``capacity * active`` of a PM.
        ALLOCATION (str): A VM allocation is negative or above its demand.
        ACTIVITY (str): A PM activity flag is not boolean.
        HOST_RANGE (str): A VM host index does not name a PM.
    """

    CAPACITY = "capacity"
    ALLOCATION = "allocation"
    ACTIVITY = "activity"
    HOST_RANGE = "host_range"
