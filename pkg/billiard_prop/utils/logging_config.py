# billiard_prop/utils/logging_config.py

import logging
import logging.config
from pathlib import Path

# Per-evaluation chatter from series truncation and quadrature panels
NOISY_LOGGERS = ("billiard_prop.services.theta", "billiard_prop.utils.quadrature")


class ConsoleNoiseFilter(logging.Filter):
    """Drop records below WARNING from ``NOISY_LOGGERS`` unless debugging."""

    def __init__(self, debug: bool = False):
        super().__init__()
        self.debug = debug

    def filter(self, record: logging.LogRecord) -> bool:
        if self.debug or record.levelno >= logging.WARNING:
            return True
        return not record.name.startswith(NOISY_LOGGERS)


def setup_logging(log_level: str = "INFO", log_file: Path | None = None) -> None:
    """
    Rich console logging at ``log_level``; with ``log_file`` every record down
    to DEBUG is also appended to that file, noisy loggers included.

    Parameters
    ----------
    log_level : str
        Console level, "INFO" or "DEBUG".
    log_file : Path | None
        Run log to append to. Parent directories are created.
    """
    debug = log_level.upper() == "DEBUG"
    handlers: dict[str, dict] = {
        "console": {
            "class": "rich.logging.RichHandler",
            "level": log_level,
            "formatter": "message",
            "filters": ["console_noise"],
            "rich_tracebacks": True,
            "show_path": debug,
            "markup": False,
            "log_time_format": "[%X]",
        },
    }
    if log_file is not None:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers["file"] = {
            "class": "logging.FileHandler",
            "filename": str(log_file),
            "mode": "a",
            "encoding": "utf-8",
            "level": "DEBUG",
            "formatter": "record",
        }

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "filters": {"console_noise": {"()": ConsoleNoiseFilter, "debug": debug}},
            "formatters": {
                "message": {"format": "%(message)s"},
                "record": {
                    "format": "%(asctime)s %(levelname)-8s %(name)s %(message)s",
                    "datefmt": "%Y-%m-%d %H:%M:%S",
                },
            },
            "handlers": handlers,
            "root": {
                "handlers": list(handlers),
                "level": "DEBUG" if log_file is not None else log_level,
            },
        }
    )
