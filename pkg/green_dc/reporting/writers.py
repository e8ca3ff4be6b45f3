"""CSV report writers.

Floats are written with ``repr`` so every value re-parses exactly; rows end with
``\\n``. Writing the same report twice yields identical bytes.
"""

from collections.abc import Iterable, Sequence
from dataclasses import fields
from pathlib import Path
import logging

import numpy as np
import pandas as pd

from green_dc.energy.economics import JOULES_PER_KWH, SlotLedger
from green_dc.forecast import ApeStats
from green_dc.simulation.engine import Comparison, RunReport
from green_dc.simulation.traces import TraceSet
from green_dc.strategies import StrategyName
from green_dc.utils.errors import ReportIOError
from green_dc.utils.setting import (
    ACCUMULATED_FILE,
    ACTIVE_PMS_FILE,
    COMPARISON_FILE,
    COOLING_FILE,
    DEMAND_FILE,
    FORECAST_FILE,
    FORECAST_SUMMARY_FILE,
    LEDGER_FILE,
    POWER_FILE,
    SOLAR_FILE,
    SOLAR_HISTORY_FILE,
    SUMMARY_FILE,
    TEMPERATURE_FILE,
)


logger = logging.getLogger(__name__)

LEDGER_COLUMNS = [f.name for f in fields(SlotLedger)]


def format_value(value) -> str:
    """Text form of a cell: ``repr`` for floats, empty for ``None``."""
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return str(bool(value))
    if isinstance(value, float | np.floating):
        return repr(float(value))
    if isinstance(value, int | np.integer):
        return str(int(value))
    return str(value)


def write_table(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write ``rows`` under ``columns`` as CSV.

    Raises:
        ReportIOError: If the file cannot be written.
    """
    frame = pd.DataFrame(
        [[format_value(v) for v in row] for row in rows], columns=list(columns), dtype=str
    )
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(path, exc.strerror or str(exc)) from exc
    return path


def write_report(
    report: RunReport, out_dir: str | Path, traces: TraceSet | None = None
) -> list[Path]:
    """Write the ledger, the summary and the per-slot plot tables of a run.

    Args:
        report (RunReport): Run to serialise.
        out_dir (str | Path): Target directory, created if needed.
        traces (TraceSet | None): Adds the generation column to the active PM table.

    Returns:
        list[Path]: Written files.
    """
    out = Path(out_dir)
    slots = [lg.slot_index for lg in report.ledgers]
    forecasts = list(report.forecast_w) + [None] * (report.n_slots - len(report.forecast_w))
    warmup = set(report.forecast_warmup_slots)

    ledger_rows = [
        [*(getattr(lg, c) for c in LEDGER_COLUMNS), forecasts[i], lg.slot_index in warmup]
        for i, lg in enumerate(report.ledgers)
    ]
    manifest = [
        write_table(
            out / LEDGER_FILE, [*LEDGER_COLUMNS, "forecast_w", "forecast_warmup"], ledger_rows
        )
    ]

    summary = {"strategy": report.strategy.value, "n_slots": report.n_slots, **report.totals()}
    manifest.append(write_table(out / SUMMARY_FILE, ["metric", "value"], summary.items()))

    manifest.append(
        write_table(
            out / ACCUMULATED_FILE,
            ["slot", "accumulated_net_dollars"],
            zip(slots, report.accumulated_series, strict=True),
        )
    )
    tau = report.slot_length_s
    manifest.append(
        write_table(
            out / POWER_FILE,
            ["slot", "it_power_w", "cooling_power_w", "green_kwh", "brown_kwh"],
            (
                [
                    lg.slot_index,
                    lg.it_power_w,
                    lg.cooling_power_w,
                    lg.green_used_kwh,
                    lg.brown_used_kwh,
                ]
                for lg in report.ledgers
            ),
        )
    )
    if traces is not None:
        active_rows = (
            [lg.slot_index, lg.n_active, float(traces.solar_w[lg.slot_index])]
            for lg in report.ledgers
        )
        active_columns = ["slot", "n_active", "solar_w"]
    else:
        active_rows = ([lg.slot_index, lg.n_active] for lg in report.ledgers)
        active_columns = ["slot", "n_active"]
    manifest.append(write_table(out / ACTIVE_PMS_FILE, active_columns, active_rows))
    manifest.append(
        write_table(
            out / COOLING_FILE,
            ["slot", "cooling_energy_kwh"],
            ([lg.slot_index, lg.cooling_power_w * tau / JOULES_PER_KWH] for lg in report.ledgers),
        )
    )
    logger.info("report for %s written to %s", report.strategy.value, out)
    return manifest


def write_comparison(
    comparison: Comparison, out_dir: str | Path, traces: TraceSet | None = None
) -> list[Path]:
    """Write one report per strategy and the margin table.

    Returns:
        list[Path]: Written files, the margin table last.
    """
    out = Path(out_dir)
    manifest: list[Path] = []
    for name, report in comparison.reports.items():
        manifest.extend(write_report(report, out / name.value, traces))

    jop = StrategyName.JOP
    margins = comparison.margins(jop) if jop in comparison.reports else {}
    rows = [
        [
            name.value,
            report.accumulated_net_dollars,
            report.green_utilization,
            margins.get(name),
            comparison.spearman.get(name),
        ]
        for name, report in comparison.reports.items()
    ]
    columns = [
        "strategy",
        "accumulated_net_dollars",
        "green_utilization",
        "jop_gain_pct",
        "spearman_active_solar",
    ]
    manifest.append(write_table(out / COMPARISON_FILE, columns, rows))
    return manifest


def write_forecast_report(
    predicted: Sequence[float], actual: Sequence[float], stats: ApeStats, out_dir: str | Path
) -> list[Path]:
    """Write per-slot forecasts with their APE and the summary statistics."""
    out = Path(out_dir)
    rows = []
    for t, (pred, act) in enumerate(zip(predicted, actual, strict=True)):
        known = not np.isnan(pred)
        ape = abs(pred - act) / act if known and act > 0 else None
        rows.append([t, float(act), float(pred) if known else None, ape])
    summary = [
        ["fraction_under_30pct", stats.fraction_under_30pct],
        ["mean_ape", stats.mean_ape],
        ["n_included", stats.n_included],
    ]
    return [
        write_table(out / FORECAST_FILE, ["slot", "actual_w", "predicted_w", "ape"], rows),
        write_table(out / FORECAST_SUMMARY_FILE, ["metric", "value"], summary),
    ]


def write_traces(traces: TraceSet, out_dir: str | Path) -> list[Path]:
    """Write a trace set in the format ``load_traces`` reads."""
    out = Path(out_dir)
    demand_rows = (
        [t, j, float(traces.demand[t, j])]
        for t in range(traces.n_slots)
        for j in range(traces.n_vms)
    )
    manifest = [
        write_table(out / DEMAND_FILE, ["slot", "vm_id", "demand_mips"], demand_rows),
        write_table(out / SOLAR_FILE, ["slot", "power_w"], enumerate(traces.solar_w)),
        write_table(out / TEMPERATURE_FILE, ["slot", "t_out_c"], enumerate(traces.t_out_c)),
    ]
    if traces.solar_history_w.size:
        manifest.append(
            write_table(
                out / SOLAR_HISTORY_FILE, ["slot", "power_w"], enumerate(traces.solar_history_w)
            )
        )
    return manifest


def read_table(path: str | Path) -> pd.DataFrame:
    """Read a written table back as strings."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл {path} не найден")
    return pd.read_csv(path, dtype=str, keep_default_na=False)


def read_ledger(path: str | Path) -> list[dict[str, float | None]]:
    """Parse a ``ledger.csv`` back into numbers (``None`` for empty cells)."""
    frame = read_table(path)
    rows = []
    for record in frame.to_dict(orient="records"):
        parsed: dict[str, float | None] = {}
        for key, cell in record.items():
            if key == "forecast_warmup":
                parsed[key] = float(cell == "True")
            else:
                parsed[key] = float(cell) if cell != "" else None
        rows.append(parsed)
    return rows
