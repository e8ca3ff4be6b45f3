from click.testing import CliRunner
import pytest

from green_dc.cli import cli
from green_dc.reporting import read_ledger, read_table
from green_dc.simulation import Scenario
from green_dc.utils.setting import parse_config


SMALL_CONFIG = """[DATACENTER]
n_pms = 3
n_vms = 6

[SIMULATION]
n_slots = 4

[GA]
population_size = 10
elite_count = 2
generations = 3

[TRACES]
history_days = 1
"""


@pytest.fixture
def runner():  # noqa: D103
    return CliRunner()


@pytest.fixture
def workdir(tmp_path, monkeypatch):  # noqa: D103
    monkeypatch.chdir(tmp_path)
    (tmp_path / "small.ini").write_text(SMALL_CONFIG, encoding="utf-8")
    return tmp_path


def test_show_config_prints_defaults(runner, workdir):  # noqa: D103
    result = runner.invoke(cli, ["show-config"])
    assert result.exit_code == 0
    assert parse_config(result.output) == Scenario()


def test_run_writes_report(runner, workdir):  # noqa: D103
    result = runner.invoke(
        cli, ["run", "--config", "small.ini", "--strategy", "dvmc", "--out", "res"]
    )
    assert result.exit_code == 0, result.output
    assert result.output.startswith("dvmc: accumulated net")
    assert len(read_ledger(workdir / "res" / "ledger.csv")) == 4


def test_run_from_trace_directory(runner, workdir):  # noqa: D103
    result = runner.invoke(cli, ["synth-traces", "--config", "small.ini", "--out", "traces"])
    assert result.exit_code == 0, result.output
    assert (workdir / "traces" / "demand.csv").exists()

    result = runner.invoke(
        cli,
        ["run", "--config", "small.ini", "--strategy", "jop", "--traces", "traces", "--out", "r"],
    )
    assert result.exit_code == 0, result.output
    ledger = read_ledger(workdir / "r" / "ledger.csv")
    assert all(row["forecast_w"] is not None for row in ledger)


def test_compare_writes_margin_table(runner, workdir):  # noqa: D103
    result = runner.invoke(
        cli, ["compare", "--config", "small.ini", "--out", "cmp", "--workers", "1"]
    )
    assert result.exit_code == 0, result.output
    table = read_table(workdir / "cmp" / "comparison.csv")
    assert table["strategy"].tolist() == ["dlb", "dvmc", "jop"]
    assert "jop vs dlb" in result.output


def test_forecast_eval(runner, workdir):  # noqa: D103
    rows = "\n".join(f"{t},{100.0 * (t % 24)}" for t in range(72))
    (workdir / "solar.csv").write_text(f"slot,power_w\n{rows}\n", encoding="utf-8")
    result = runner.invoke(cli, ["forecast-eval", "--solar", "solar.csv", "--out", "fc"])
    assert result.exit_code == 0, result.output
    assert (workdir / "fc" / "forecast_summary.csv").exists()
    assert "APE < 30 %" in result.output


def test_invalid_config_exits_with_validation_code(runner, workdir):  # noqa: D103
    (workdir / "bad.ini").write_text("[DATACENTER]\nn_pms = -1\n", encoding="utf-8")
    result = runner.invoke(cli, ["run", "--config", "bad.ini"])
    assert result.exit_code == 1
    assert "n_pms" in result.output


def test_missing_config_exits_with_io_code(runner, workdir):  # noqa: D103
    result = runner.invoke(cli, ["run", "--config", "absent.ini"])
    assert result.exit_code == 2


def test_bad_trace_exits_with_validation_code(runner, workdir):  # noqa: D103
    runner.invoke(cli, ["synth-traces", "--config", "small.ini", "--out", "traces"])
    (workdir / "traces" / "solar.csv").write_text("slot,power_w\n0,-1\n", encoding="utf-8")
    result = runner.invoke(cli, ["run", "--config", "small.ini", "--traces", "traces"])
    assert result.exit_code == 1


def test_synth_and_traces_conflict_is_validation_error(runner, workdir):  # noqa: D103
    result = runner.invoke(cli, ["run", "--config", "small.ini", "--synth", "--traces", "t"])
    assert result.exit_code == 1
    assert "mutually exclusive" in result.output
