from __future__ import annotations

from green_dc.simulation.engine import (
    Comparison,
    RunReport,
    compare,
    delay_factors,
    margin_pct,
    run,
    spearman_active_vs_solar,
    step,
)
from green_dc.simulation.scenario import Scenario
from green_dc.simulation.traces import SlotTraces, TraceSet, synthesize_traces


__all__ = [
    "Comparison",
    "RunReport",
    "Scenario",
    "SlotTraces",
    "TraceSet",
    "compare",
    "delay_factors",
    "margin_pct",
    "run",
    "spearman_active_vs_solar",
    "step",
    "synthesize_traces",
]
