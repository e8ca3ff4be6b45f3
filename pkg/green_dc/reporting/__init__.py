from __future__ import annotations

from green_dc.reporting.loaders import (
    load_demand,
    load_solar,
    load_temperature,
    load_trace_dir,
    load_traces,
)
from green_dc.reporting.writers import (
    read_ledger,
    read_table,
    write_comparison,
    write_forecast_report,
    write_report,
    write_traces,
)


__all__ = [
    "load_demand",
    "load_solar",
    "load_temperature",
    "load_trace_dir",
    "load_traces",
    "read_ledger",
    "read_table",
    "write_comparison",
    "write_forecast_report",
    "write_report",
    "write_traces",
]
