"""CSV trace loaders.

Every loader rejects malformed input instead of defaulting it. Line numbers in
errors are 1-based and count the header.
"""

from pathlib import Path
import logging
import math

import numpy as np
from numpy.typing import NDArray
import pandas as pd

from green_dc.simulation.traces import TraceSet
from green_dc.utils.errors import TraceCoverageError, TraceParseError, TraceRangeError
from green_dc.utils.setting import (
    DEMAND_FILE,
    SOLAR_FILE,
    SOLAR_HISTORY_FILE,
    TEMPERATURE_FILE,
)


logger = logging.getLogger(__name__)

DEMAND_COLUMNS = ["slot", "vm_id", "demand_mips"]
SOLAR_COLUMNS = ["slot", "power_w"]
TEMPERATURE_COLUMNS = ["slot", "t_out_c"]


def _read_table(path: str | Path, columns: list[str]) -> pd.DataFrame:
    """Read a CSV as strings and check its header."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл {path} не найден")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise TraceParseError("file is empty", path=path, line=1) from exc
    except pd.errors.ParserError as exc:
        raise TraceParseError(f"malformed row: {exc}", path=path) from exc
    header = [str(c).strip() for c in frame.columns]
    if header != columns:
        raise TraceParseError(
            f"expected header {','.join(columns)}, got {','.join(header)}", path=path, line=1
        )
    frame.columns = columns
    return frame


def _line(row: int) -> int:
    return row + 2


def _floats(frame: pd.DataFrame, column: str, path: Path) -> NDArray[np.float64]:
    values = np.empty(len(frame))
    for row, cell in enumerate(frame[column]):
        try:
            values[row] = float(cell)
        except (TypeError, ValueError):
            raise TraceParseError(
                f"column {column}: {cell!r} is not a number", path=path, line=_line(row)
            ) from None
        if not math.isfinite(values[row]):
            raise TraceParseError(f"column {column}: {cell!r} is not finite", path, _line(row))
    return values


def _indices(frame: pd.DataFrame, column: str, path: Path) -> NDArray[np.int64]:
    values = _floats(frame, column, path)
    for row, value in enumerate(values):
        if value < 0 or value != int(value):
            raise TraceParseError(
                f"column {column}: {value!r} is not a non-negative integer", path, _line(row)
            )
    return values.astype(np.int64)


def _non_negative(values: NDArray, column: str, path: Path) -> None:
    negative = np.flatnonzero(values < 0)
    if negative.size:
        row = int(negative[0])
        raise TraceRangeError(f"column {column}: {values[row]!r} is negative", path, _line(row))


def _per_slot(path: str | Path, columns: list[str], non_negative: bool) -> NDArray[np.float64]:
    path = Path(path)
    frame = _read_table(path, columns)
    slots = _indices(frame, "slot", path)
    values = _floats(frame, columns[1], path)
    if non_negative:
        _non_negative(values, columns[1], path)

    seen: dict[int, int] = {}
    for row, slot in enumerate(slots):
        if slot in seen:
            raise TraceCoverageError(f"duplicate slot {slot}", path, _line(row))
        seen[int(slot)] = row
    n_slots = len(slots)
    missing = sorted(set(range(n_slots)) - seen.keys())
    if missing:
        raise TraceCoverageError(f"slot {missing[0]} is missing", path)

    result = np.empty(n_slots)
    result[slots] = values
    return result


def load_solar(path: str | Path) -> NDArray[np.float64]:
    """Read ``slot,power_w`` rows into a generation series, W."""
    return _per_slot(path, SOLAR_COLUMNS, non_negative=True)


def load_temperature(path: str | Path) -> NDArray[np.float64]:
    """Read ``slot,t_out_c`` rows into an outside-temperature series, °C."""
    return _per_slot(path, TEMPERATURE_COLUMNS, non_negative=False)


def load_demand(path: str | Path) -> NDArray[np.float64]:
    """Read ``slot,vm_id,demand_mips`` rows into an ``n_slots x n_vms`` matrix.

    Raises:
        TraceParseError: If the header or a cell is malformed.
        TraceCoverageError: If a (slot, vm_id) pair is duplicated or missing.
        TraceRangeError: If a demand is negative.
    """
    path = Path(path)
    frame = _read_table(path, DEMAND_COLUMNS)
    slots = _indices(frame, "slot", path)
    vms = _indices(frame, "vm_id", path)
    demand = _floats(frame, "demand_mips", path)
    _non_negative(demand, "demand_mips", path)
    if len(frame) == 0:
        raise TraceCoverageError("no demand rows", path)

    pairs = pd.DataFrame({"slot": slots, "vm_id": vms})
    duplicated = np.flatnonzero(pairs.duplicated().to_numpy())
    if duplicated.size:
        row = int(duplicated[0])
        raise TraceCoverageError(
            f"duplicate row for (slot {slots[row]}, vm_id {vms[row]})", path, _line(row)
        )

    n_slots, n_vms = int(slots.max()) + 1, int(vms.max()) + 1
    matrix = np.full((n_slots, n_vms), np.nan)
    matrix[slots, vms] = demand
    holes = np.argwhere(np.isnan(matrix))
    if holes.size:
        slot, vm = (int(v) for v in holes[0])
        raise TraceCoverageError(f"no row for (slot {slot}, vm_id {vm})", path)
    return matrix


def load_traces(
    demand_path: str | Path,
    solar_path: str | Path,
    temp_path: str | Path,
    history_path: str | Path | None = None,
) -> TraceSet:
    """Load a complete trace set; all files must cover the same slots.

    Args:
        demand_path: ``slot,vm_id,demand_mips`` CSV.
        solar_path: ``slot,power_w`` CSV.
        temp_path: ``slot,t_out_c`` CSV.
        history_path: Optional ``slot,power_w`` CSV of generation before slot 0.

    Raises:
        FileNotFoundError: If a file is missing.
        TraceError: If a file is malformed or the files disagree on the slots.
    """
    demand = load_demand(demand_path)
    solar = load_solar(solar_path)
    t_out = load_temperature(temp_path)
    for path, series in ((solar_path, solar), (temp_path, t_out)):
        if series.size != demand.shape[0]:
            first = min(series.size, demand.shape[0])
            raise TraceCoverageError(
                f"covers {series.size} slots, demand covers {demand.shape[0]}; "
                f"first offending slot {first}",
                path,
            )
    history = load_solar(history_path) if history_path is not None else np.empty(0)
    logger.info("loaded traces: %d slots x %d VMs", demand.shape[0], demand.shape[1])
    return TraceSet(demand, solar, t_out, history)


def load_trace_dir(directory: str | Path) -> TraceSet:
    """Load the trace files ``write_traces`` produces from one directory."""
    directory = Path(directory)
    history = directory / SOLAR_HISTORY_FILE
    return load_traces(
        directory / DEMAND_FILE,
        directory / SOLAR_FILE,
        directory / TEMPERATURE_FILE,
        history if history.exists() else None,
    )
