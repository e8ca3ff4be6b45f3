from enum import Enum


class StrategyName(Enum):
    """Enumeration of the migration strategies the simulator can run.

    Attributes:
        DLB: Dynamic load balancing, all PMs stay active.
        DVMC: Dynamic VM consolidation with threshold-driven sleeping.
        JOP: Joint optimization planning with the genetic search.
        NOOP: Keeps the placement unchanged; baseline for tests.
    """

    DLB = "dlb"
    DVMC = "dvmc"
    JOP = "jop"
    NOOP = "noop"

    @classmethod
    def parse(cls, value: "str | StrategyName") -> "StrategyName":
        """Resolve a strategy from its (case-insensitive) name."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"Unknown strategy {value!r}; expected one of: {names}") from None
