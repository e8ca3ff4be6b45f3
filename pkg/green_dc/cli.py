"""Command-line interface.

Exit codes: 0 on success, 1 on validation errors, 2 on I/O errors.
"""

from collections.abc import Callable
import functools
from pathlib import Path

import click
import numpy as np

from green_dc.forecast import ape_stats, forecast_series
from green_dc.reporting import (
    load_solar,
    load_trace_dir,
    write_comparison,
    write_forecast_report,
    write_report,
    write_traces,
)
from green_dc.simulation import Scenario, TraceSet, compare, run, synthesize_traces
from green_dc.simulation.traces import slots_per_day
from green_dc.strategies import StrategyName
from green_dc.utils.errors import GreenDCError
from green_dc.utils.logger import setup_logging
from green_dc.utils.setting import CONFIG_PATH, load_config, scenario_to_ini


EXIT_VALIDATION = 1
EXIT_IO = 2

STRATEGY_CHOICES = [s.value for s in StrategyName if s is not StrategyName.NOOP]


class OptionConflictError(click.UsageError):
    """Options that cannot be combined."""

    exit_code = EXIT_VALIDATION


def handle_errors(func: Callable) -> Callable:
    """Turn library errors into messages and exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except OSError as exc:
            click.echo(f"Ошибка ввода-вывода: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_IO) from exc
        except (GreenDCError, ValueError) as exc:
            click.echo(f"Ошибка: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_VALIDATION) from exc

    return wrapper


def _scenario(config: Path | None, seed: int | None) -> Scenario:
    if config is None and CONFIG_PATH.exists():
        config = CONFIG_PATH
    scenario = load_config(config) if config is not None else Scenario()
    return scenario.with_seed(seed) if seed is not None else scenario


def _traces(scenario: Scenario, traces_dir: Path | None) -> TraceSet:
    if traces_dir is not None:
        return load_trace_dir(traces_dir)
    return synthesize_traces(scenario)


config_option = click.option(
    "--config",
    "config",
    type=click.Path(path_type=Path),
    default=None,
    help=f"Scenario INI file; {CONFIG_PATH} when present, else built-in defaults.",
)
seed_option = click.option("--seed", type=int, default=None, help="Overrides the scenario seed.")
out_option = click.option(
    "--out", type=click.Path(file_okay=False, path_type=Path), default=Path("results")
)


@click.group()
@click.option("--log-level", default=None, help="error, info or debug; overrides GREENDC_LOG.")
def cli(log_level: str | None):
    """Green-energy aware VM migration simulator."""
    setup_logging(log_level)


@cli.command("run")
@config_option
@click.option("--strategy", type=click.Choice(STRATEGY_CHOICES), default=None)
@click.option("--traces", "traces_dir", type=click.Path(path_type=Path), default=None)
@click.option("--synth", is_flag=True, help="Use synthetic traces (the default without --traces).")
@seed_option
@out_option
@handle_errors
def run_command(  # noqa: PLR0913
    config: Path | None,
    strategy: str | None,
    traces_dir: Path | None,
    synth: bool,
    seed: int | None,
    out: Path,
):
    """Simulate one strategy and write its report."""
    if synth and traces_dir is not None:
        raise OptionConflictError("--synth and --traces are mutually exclusive")
    scenario = _scenario(config, seed)
    if strategy is not None:
        scenario = scenario.with_strategy(strategy)
    traces = _traces(scenario, traces_dir)

    report = run(scenario, traces)
    write_report(report, out, traces)
    click.echo(
        f"{report.strategy.value}: accumulated net {report.accumulated_net_dollars!r} $, "
        f"green utilization {report.green_utilization!r}"
    )


@cli.command("compare")
@config_option
@click.option("--traces", "traces_dir", type=click.Path(path_type=Path), default=None)
@seed_option
@out_option
@click.option("--workers", type=click.IntRange(min=1), default=3, show_default=True)
@handle_errors
def compare_command(
    config: Path | None, traces_dir: Path | None, seed: int | None, out: Path, workers: int
):
    """Run DLB, DVMC and JOP on identical traces and write the margin table."""
    scenario = _scenario(config, seed)
    traces = _traces(scenario, traces_dir)
    comparison = compare(scenario, traces, workers=workers)
    write_comparison(comparison, out, traces)

    for name, report in comparison.reports.items():
        click.echo(f"{name.value}: accumulated net {report.accumulated_net_dollars!r} $")
    for name, gain in comparison.margins().items():
        shown = "n/a" if gain is None else f"{gain:.2f} %"
        click.echo(f"jop vs {name.value}: {shown}")


@cli.command("forecast-eval")
@click.option("--solar", "solar_path", type=click.Path(path_type=Path), required=True)
@config_option
@out_option
@handle_errors
def forecast_eval_command(solar_path: Path, config: Path | None, out: Path):
    """Evaluate rolling k-NN forecasts of a generation series."""
    scenario = _scenario(config, None)
    actual = load_solar(solar_path)
    predicted = forecast_series(
        actual, scenario.forecast, slots_per_day(scenario.simulation.slot_length_s)
    )
    known = ~np.isnan(predicted)
    stats = ape_stats(predicted[known], actual[known], scenario.forecast)
    write_forecast_report(predicted, actual, stats, out)
    fraction = "n/a" if stats.fraction_under_30pct is None else f"{stats.fraction_under_30pct:.4f}"
    click.echo(f"APE < 30 %: {fraction} over {stats.n_included} slots")


@cli.command("synth-traces")
@config_option
@seed_option
@out_option
@handle_errors
def synth_traces_command(config: Path | None, seed: int | None, out: Path):
    """Write synthetic traces in the format --traces reads."""
    scenario = _scenario(config, seed)
    for path in write_traces(synthesize_traces(scenario), out):
        click.echo(str(path))


@cli.command("show-config")
@config_option
@handle_errors
def show_config_command(config: Path | None):
    """Print the scenario with every default filled in."""
    click.echo(scenario_to_ini(_scenario(config, None)), nl=False)
