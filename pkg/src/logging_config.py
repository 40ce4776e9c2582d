"""Logging configuration for the PRIMEBALL harness."""

import logging
import logging.config
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

from .config import Settings, get_settings

PACKAGE_LOGGER = "primeball"


def configure_logging(settings: Optional[Settings] = None, console_level: Optional[str] = None) -> None:
    """Configure logging for the application."""
    settings = settings or get_settings()

    logs_dir = Path(settings.logs_dir)
    try:
        logs_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"Warning: Could not create logs directory: {e}", file=sys.stderr)
        logs_dir = Path(".")

    log_config = get_logging_config(settings, logs_dir)
    if console_level:
        log_config["handlers"]["console"]["level"] = console_level
        log_config["loggers"][PACKAGE_LOGGER]["level"] = console_level
        if "console" not in log_config["loggers"][PACKAGE_LOGGER]["handlers"]:
            log_config["loggers"][PACKAGE_LOGGER]["handlers"].append("console")
    logging.config.dictConfig(log_config)


def get_logging_config(settings: Settings, logs_dir: Path) -> Dict[str, Any]:
    """Get logging configuration dictionary."""
    log_file_path = logs_dir / settings.log_file

    config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "standard": {
                "format": "%(asctime)s [%(levelname)8s] %(name)s: %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S",
            },
            "detailed": {
                "format": "%(asctime)s [%(levelname)8s] %(name)s:%(lineno)d: %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S",
            },
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": settings.log_level,
                "formatter": settings.log_format if settings.log_format in ("standard", "detailed") else "standard",
                "stream": sys.stderr,
            },
            "file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": settings.log_level,
                "formatter": "detailed",
                "filename": str(log_file_path),
                "maxBytes": 10485760,  # 10MB
                "backupCount": 5,
                "encoding": "utf8",
            },
            "error_file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": "ERROR",
                "formatter": "detailed",
                "filename": str(logs_dir / "error.log"),
                "maxBytes": 10485760,  # 10MB
                "backupCount": 5,
                "encoding": "utf8",
            },
        },
        "loggers": {
            PACKAGE_LOGGER: {
                "level": settings.log_level,
                "handlers": ["console", "file", "error_file"],
                "propagate": False,
            },
        },
        "root": {
            "level": "WARNING",
            "handlers": ["console"],
        },
    }

    if settings.debug or settings.is_development:
        config["loggers"][PACKAGE_LOGGER]["level"] = "DEBUG"
    elif settings.is_production:
        # Console stays quiet in production; the CLI renders its own output
        config["handlers"]["console"]["level"] = "WARNING"
        config["loggers"][PACKAGE_LOGGER]["handlers"] = ["file", "error_file"]

    return config


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Get a logger under the package namespace."""
    if name is None:
        import inspect

        frame = inspect.currentframe().f_back
        name = frame.f_globals.get("__name__", "unknown")

    if name.startswith("src."):
        name = f"{PACKAGE_LOGGER}.{name[4:]}"
    elif name != PACKAGE_LOGGER and not name.startswith(PACKAGE_LOGGER + "."):
        name = f"{PACKAGE_LOGGER}.{name}"
    return logging.getLogger(name)


@contextmanager
def log_performance(operation: str, logger: Optional[logging.Logger] = None) -> Iterator[None]:
    """Log how long a block took (DEBUG level)."""
    logger = logger or get_logger(PACKAGE_LOGGER)
    started = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - started
        logger.debug(f"{operation} took {elapsed:.3f}s")


class LoggingMixin:
    """Mixin class to add logging capabilities to any class."""

    @property
    def logger(self) -> logging.Logger:
        """Get a logger bound to this class."""
        if not hasattr(self, "_logger"):
            class_name = f"{self.__class__.__module__}.{self.__class__.__qualname__}"
            self._logger = get_logger(class_name)
        return self._logger
