import logging
import os

from green_dc.utils.setting import LOG_ENV_VAR


LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

LOG_FORMAT = "%(asctime)s %(levelname)-5s %(name)s: %(message)s"


def resolve_level(value: str | None) -> int:
    """Translate a ``GREENDC_LOG`` value into a ``logging`` level.

    Args:
        value (str | None): ``error``, ``info`` or ``debug`` (case-insensitive).

    Returns:
        int: The matching level; ``logging.ERROR`` for empty or unknown values.
    """
    if not value:
        return logging.ERROR
    return LEVELS.get(value.strip().lower(), logging.ERROR)


def setup_logging(level: str | None = None) -> int:
    """Configure the ``green_dc`` logger hierarchy once per process.

    The level comes from ``level`` when given, otherwise from the ``GREENDC_LOG``
    environment variable.

    Returns:
        int: The level that was applied.
    """
    raw = level if level is not None else os.environ.get(LOG_ENV_VAR)
    resolved = resolve_level(raw)

    root = logging.getLogger("green_dc")
    root.setLevel(resolved)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    if raw and raw.strip().lower() not in LEVELS:
        root.error("Unknown %s value %r, falling back to 'error'", LOG_ENV_VAR, raw)
    return resolved
