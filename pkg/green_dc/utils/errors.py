"""Exception hierarchy shared by the simulator packages.

Every specific error also derives from the builtin it refines, so callers that
only know about ``ValueError`` or ``OSError`` keep working.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any


class GreenDCError(Exception):
    """Base class for all simulator errors."""


class DomainError(GreenDCError, ValueError):
    """A numeric argument lies outside the domain of a model equation."""


class DimensionError(GreenDCError, ValueError):
    """Vectors or matrices with incompatible shapes were combined."""


class HistoryError(GreenDCError, ValueError):
    """The forecaster does not have enough history to answer a query."""


class SearchSpaceError(GreenDCError, ValueError):
    """An exhaustive search would exceed the configured enumeration bound."""


class PlanError(GreenDCError, ValueError):
    """An action plan contradicts itself or the state it is applied to.

    Attributes:
        pms (tuple[int, ...]): Offending PM indices.
        vms (tuple[int, ...]): Offending VM indices.
    """

    def __init__(self, message: str, pms: Iterable[int] = (), vms: Iterable[int] = ()):
        self.pms = tuple(sorted(pms))
        self.vms = tuple(sorted(vms))
        details = []
        if self.pms:
            details.append(f"pms={list(self.pms)}")
        if self.vms:
            details.append(f"vms={list(self.vms)}")
        super().__init__(f"{message} ({', '.join(details)})" if details else message)


class ConstraintViolationError(GreenDCError, ValueError):
    """A committed state breaks one of the placement constraints.

    Attributes:
        violations (tuple): The violation records reported by ``validate_placement``.
    """

    def __init__(self, violations: Sequence[Any]):
        self.violations = tuple(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        extra = len(self.violations) - 5
        more = f" (+{extra} more)" if extra > 0 else ""
        super().__init__(f"{len(self.violations)} constraint violation(s): {lines}{more}")


class ConfigError(GreenDCError, ValueError):
    """A configuration document is malformed or out of range.

    Attributes:
        key (str | None): ``section.key`` the error refers to.
        line (int | None): 1-based line number inside the document.
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = ""
        if key:
            where += f" [{key}]"
        if line:
            where += f" (line {line})"
        super().__init__(f"{message}{where}")


class TraceError(GreenDCError, ValueError):
    """Base class for trace file problems.

    Attributes:
        path (Path | None): File the problem was found in.
        line (int | None): 1-based line number, header included.
    """

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = Path(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where += f" in {self.path}"
        if line is not None:
            where += f" at line {line}"
        super().__init__(f"{message}{where}")


class TraceParseError(TraceError):
    """A row could not be parsed (bad header, non-numeric cell, wrong arity)."""


class TraceCoverageError(TraceError):
    """The rows do not cover every (slot, id) pair exactly once."""


class TraceRangeError(TraceError):
    """A value is outside its physical range (e.g. negative generation)."""


class ReportIOError(GreenDCError, OSError):
    """Writing a report file failed.

    Attributes:
        path (Path): The file that could not be written.
    """

    def __init__(self, path: str | Path, reason: str):
        self.path = Path(path)
        super().__init__(f"Не удалось записать {self.path}: {reason}")
