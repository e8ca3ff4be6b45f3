import configparser
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ValidationError

from green_dc.simulation.scenario import Scenario
from green_dc.utils.errors import ConfigError


# Путь до конфигурационного файла
CONFIG_PATH = Path("config.ini")

# Переменная окружения, задающая уровень логирования
LOG_ENV_VAR = "GREENDC_LOG"

# Имена файлов трасс
DEMAND_FILE = "demand.csv"
SOLAR_FILE = "solar.csv"
SOLAR_HISTORY_FILE = "solar_history.csv"
TEMPERATURE_FILE = "temperature.csv"

# Имена файлов отчёта
LEDGER_FILE = "ledger.csv"
SUMMARY_FILE = "summary.csv"
ACCUMULATED_FILE = "accumulated_net.csv"
POWER_FILE = "power_breakdown.csv"
ACTIVE_PMS_FILE = "active_pms.csv"
COOLING_FILE = "cooling_energy.csv"
COMPARISON_FILE = "comparison.csv"
FORECAST_FILE = "forecast.csv"
FORECAST_SUMMARY_FILE = "forecast_summary.csv"

# Поля, которые не читаются из секции, а задаются сценарием
EXCLUDED_KEYS = {"ga": {"rng_seed", "workers"}}


def _section_fields(section: str) -> set[str]:
    model = Scenario.model_fields[section].annotation
    return set(model.model_fields) - EXCLUDED_KEYS.get(section, set())


def _line_index(text: str) -> dict[tuple[str, str | None], int]:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    index: dict[tuple[str, str | None], int] = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            index.setdefault((section, None), number)
        elif section is not None:
            key = line.split("=", 1)[0].split(":", 1)[0].strip().lower()
            index.setdefault((section, key), number)
    return index


def parse_config(text: str, source: str = "<string>") -> Scenario:
    """Build a ``Scenario`` from INI text; absent keys keep their defaults.

    Raises:
        ConfigError: On syntax errors, unknown sections or keys and values out
            of range; the error names the key and its line.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.DuplicateOptionError as exc:
        key = f"{exc.section}.{exc.option}"
        raise ConfigError("duplicate key", key=key, line=exc.lineno) from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError("duplicate section", key=exc.section, line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"cannot parse {source}", line=line) from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {source}: {exc}") from exc

    lines = _line_index(text)
    data: dict[str, dict[str, str]] = {}
    for section_name in parser.sections():
        section = section_name.lower()
        if section not in Scenario.model_fields:
            raise ConfigError("unknown section", key=section_name, line=lines.get((section, None)))
        allowed = _section_fields(section)
        for key, value in parser.items(section_name):
            if key not in allowed:
                raise ConfigError(
                    "unknown key", key=f"{section_name}.{key}", line=lines.get((section, key))
                )
            data.setdefault(section, {})[key] = value

    try:
        return Scenario.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = [str(part) for part in error["loc"]]
        section = loc[0] if loc else None
        key = loc[1] if len(loc) > 1 else None
        line = lines.get((section, key)) or lines.get((section, None))
        name = ".".join(p.upper() if i == 0 else p for i, p in enumerate(loc[:2])) or None
        raise ConfigError(error["msg"], key=name, line=line) from exc


def load_config(path: str | Path = CONFIG_PATH) -> Scenario:
    """Read a scenario from an INI file.

    Args:
        path (str | Path): Configuration file.

    Returns:
        Scenario: Validated scenario; an empty file yields the defaults.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigError: If the document is malformed or out of range.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Файл {path} не найден")
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def _format(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def scenario_to_ini(scenario: Scenario) -> str:
    """Serialise every section of ``scenario`` as INI text."""
    parser = configparser.ConfigParser(interpolation=None)
    for section in Scenario.model_fields:
        model: BaseModel = getattr(scenario, section)
        if section == "apps":
            parser[section.upper()] = {"profiles": scenario.apps.to_text()}
            continue
        parser[section.upper()] = {
            name: _format(getattr(model, name))
            for name in type(model).model_fields
            if name in _section_fields(section)
        }

    lines: list[str] = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in parser[section].items())
        lines.append("")
    return "\n".join(lines)


def save_config(scenario: Scenario, path: str | Path = CONFIG_PATH) -> Path:
    """Write ``scenario`` to an INI file that ``load_config`` reads back equal.

    Raises:
        OSError: If writing the file fails.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(scenario_to_ini(scenario))
    return path
