"""Slot-by-slot simulation of a migration strategy over a trace set."""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math

import numpy as np
from numpy.typing import NDArray
import pandas as pd

from green_dc.datacenter import DatacenterState, TransitionCounts, allocate_capacity, apply_plan
from green_dc.energy.economics import JOULES_PER_KWH, EnergySupply, SlotLedger, net_revenue
from green_dc.energy.objective import ModelBundle, measure_power, revenue_delay_factors
from green_dc.simulation.scenario import Scenario, SimulationSettings
from green_dc.simulation.traces import SlotTraces, TraceSet, slots_per_day
from green_dc.strategies import MigrationStrategy, SlotContext, StrategyName, build_strategy


logger = logging.getLogger(__name__)

COMPARED_STRATEGIES = (StrategyName.DLB, StrategyName.DVMC, StrategyName.JOP)


@dataclass(frozen=True)
class RunReport:
    """Outcome of one simulated run.

    Attributes:
        strategy (StrategyName): Strategy that was simulated.
        ledgers (tuple[SlotLedger, ...]): One ledger per slot.
        slot_length_s (float): Slot length, s.
        forecast_w (tuple[float | None, ...]): Generation the strategy planned
            with; ``None`` for strategies without a forecast.
        forecast_warmup_slots (tuple[int, ...]): Slots planned with the realised
            generation because the forecaster lacked history.
    """

    strategy: StrategyName
    ledgers: tuple[SlotLedger, ...]
    slot_length_s: float
    forecast_w: tuple[float | None, ...] = field(default=(), repr=False)
    forecast_warmup_slots: tuple[int, ...] = ()

    @property
    def n_slots(self) -> int:  # noqa: D102
        return len(self.ledgers)

    @property
    def accumulated_net_dollars(self) -> float:  # noqa: D102
        return math.fsum(ledger.net_dollars for ledger in self.ledgers)

    @property
    def accumulated_series(self) -> list[float]:
        """Net revenue accumulated up to and including each slot."""
        nets = [ledger.net_dollars for ledger in self.ledgers]
        return [math.fsum(nets[: i + 1]) for i in range(len(nets))]

    @property
    def green_utilization(self) -> float:
        """Share of the available green energy that was consumed; 1.0 if none was available."""
        available = math.fsum(ledger.green_available_kwh for ledger in self.ledgers)
        if available <= 0:
            return 1.0
        return math.fsum(ledger.green_used_kwh for ledger in self.ledgers) / available

    @property
    def active_pm_counts(self) -> list[int]:  # noqa: D102
        return [ledger.n_active for ledger in self.ledgers]

    @property
    def cooling_energy_kwh(self) -> list[float]:  # noqa: D102
        return [
            ledger.cooling_power_w * self.slot_length_s / JOULES_PER_KWH for ledger in self.ledgers
        ]

    def totals(self) -> dict[str, float]:
        """Run-level sums of the ledger columns."""
        return {
            "accumulated_net_dollars": self.accumulated_net_dollars,
            "revenue_dollars": math.fsum(lg.revenue_dollars for lg in self.ledgers),
            "energy_cost_dollars": math.fsum(lg.energy_cost_dollars for lg in self.ledgers),
            "wakeup_cost_dollars": math.fsum(lg.wakeup_cost_dollars for lg in self.ledgers),
            "migration_cost_dollars": math.fsum(lg.migration_cost_dollars for lg in self.ledgers),
            "green_used_kwh": math.fsum(lg.green_used_kwh for lg in self.ledgers),
            "brown_used_kwh": math.fsum(lg.brown_used_kwh for lg in self.ledgers),
            "cooling_energy_kwh": math.fsum(self.cooling_energy_kwh),
            "green_utilization": self.green_utilization,
            "n_migrations": float(sum(lg.n_migrations for lg in self.ledgers)),
            "n_wakeups": float(sum(lg.n_wakeups for lg in self.ledgers)),
        }


def delay_factors(
    state: DatacenterState, counts: TransitionCounts, settings: SimulationSettings
) -> NDArray[np.float64]:
    """Per-VM revenue multipliers of a committed slot; see ``revenue_delay_factors``."""
    migrated = np.zeros(state.n_vms, dtype=bool)
    migrated[sorted(counts.migrated_vms)] = True
    on_woken = np.isin(state.hosts, sorted(counts.woken_pms))
    return revenue_delay_factors(migrated, on_woken, settings.delays(), settings.slot_length_s)


def step(
    state: DatacenterState,
    slot_traces: SlotTraces,
    strategy: MigrationStrategy,
    models: ModelBundle,
    settings: SimulationSettings,
) -> tuple[DatacenterState, SlotLedger]:
    """Simulate one slot.

    Demands are updated, the strategy plans, the plan is applied, capacity is
    allocated, delay penalties are applied to revenue, power and cooling are
    evaluated and the slot is billed.

    Returns:
        tuple[DatacenterState, SlotLedger]: Committed state of the slot and its ledger.

    Raises:
        ConstraintViolationError: If the committed state breaks a constraint.
        PlanError: If the strategy produced an inconsistent plan.
    """
    current = state.with_demands(slot_traces.demand_mips, slot_index=slot_traces.slot_index)
    context = SlotContext(slot_traces.slot_index, slot_traces.t_out_c, slot_traces.solar_w)
    plan = strategy.plan(current, context)
    planned, counts = apply_plan(current, plan)

    allocations = allocate_capacity(planned, planned.placement)
    committed = planned.with_allocations(allocations)
    factors = delay_factors(committed, counts, settings)

    reading = measure_power(committed, models, slot_traces.t_out_c)
    supply = EnergySupply.from_power(slot_traces.solar_w, committed.slot_length_s)
    ledger = net_revenue(
        current, committed, allocations, reading, supply, models.costs, revenue_factors=factors
    )
    strategy.observe(slot_traces.solar_w)
    return committed, ledger


def run(
    scenario: Scenario, traces: TraceSet, strategy: MigrationStrategy | None = None
) -> RunReport:
    """Simulate ``scenario.simulation.n_slots`` slots from the initial state.

    Args:
        scenario (Scenario): Run parameters.
        traces (TraceSet): Inputs covering at least the simulated slots.
        strategy (MigrationStrategy | None): Strategy to drive; built from the
            scenario when omitted.

    Returns:
        RunReport: Ledgers and aggregates of the run.
    """
    sim = scenario.simulation
    traces.check(sim.n_slots, scenario.datacenter.n_vms)
    models = scenario.models()
    if strategy is None:
        strategy = build_strategy(
            scenario.strategy.name,
            scenario.strategy.thresholds(),
            scenario.ga_config(),
            models,
            scenario.forecast,
            solar_history_w=list(traces.solar_history_w),
            slots_per_day=slots_per_day(sim.slot_length_s),
        )

    state = scenario.initial_state()
    ledgers: list[SlotLedger] = []
    forecasts: list[float | None] = []
    warmup: list[int] = []
    for t in range(sim.n_slots):
        state, ledger = step(state, traces.slot(t), strategy, models, sim)
        ledgers.append(ledger)
        forecasts.append(strategy.last_forecast_w)
        if strategy.last_forecast_warmup:
            warmup.append(t)
        logger.info(
            "%s slot %d: net %.4f $, %d active PMs, %d migrations",
            strategy.name.value,
            t,
            ledger.net_dollars,
            ledger.n_active,
            ledger.n_migrations,
        )

    return RunReport(
        strategy=strategy.name,
        ledgers=tuple(ledgers),
        slot_length_s=sim.slot_length_s,
        forecast_w=tuple(forecasts),
        forecast_warmup_slots=tuple(warmup),
    )


def spearman_active_vs_solar(report: RunReport, traces: TraceSet) -> float | None:
    """Rank correlation between active PM counts and generation; ``None`` if undefined.

    Ties share their average rank; the result is the Pearson correlation of the ranks.
    """
    active = pd.Series(report.active_pm_counts, dtype=float).rank()
    solar = pd.Series(traces.solar_w[: report.n_slots], dtype=float).rank()
    value = active.corr(solar)
    return None if pd.isna(value) else float(value)


def margin_pct(net: float, baseline: float) -> float | None:
    """Percentage gain of ``net`` over ``baseline``; ``None`` for a zero baseline."""
    if baseline == 0:
        return None
    return (net - baseline) / abs(baseline) * 100.0


@dataclass(frozen=True)
class Comparison:
    """Runs of several strategies on identical traces."""

    reports: dict[StrategyName, RunReport]
    spearman: dict[StrategyName, float | None]

    def margins(
        self, subject: StrategyName = StrategyName.JOP
    ) -> dict[StrategyName, float | None]:
        """Gain of ``subject`` over every other compared strategy, in percent."""
        net = self.reports[subject].accumulated_net_dollars
        return {
            name: margin_pct(net, report.accumulated_net_dollars)
            for name, report in self.reports.items()
            if name != subject
        }


def compare(
    scenario: Scenario,
    traces: TraceSet,
    strategies: Sequence[StrategyName] = COMPARED_STRATEGIES,
    workers: int = 1,
) -> Comparison:
    """Run each strategy on the same traces.

    Runs share no mutable state, so ``workers > 1`` executes them in threads
    without affecting the results.
    """
    names = [StrategyName.parse(s) for s in strategies]
    scenarios = [scenario.with_strategy(name) for name in names]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda s: run(s, traces), scenarios))
    else:
        reports = [run(s, traces) for s in scenarios]

    by_name = dict(zip(names, reports, strict=True))
    return Comparison(
        reports=by_name,
        spearman={name: spearman_active_vs_solar(r, traces) for name, r in by_name.items()},
    )
