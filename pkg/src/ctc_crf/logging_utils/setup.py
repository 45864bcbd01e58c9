from __future__ import annotations

import logging
from logging.config import dictConfig
from typing import Any, Optional

import structlog

from ..settings import AppSettings, get_settings


def configure_logging(settings: Optional[AppSettings] = None) -> None:
    settings = settings or get_settings()
    level = settings.telemetry.log_level.upper()
    structured = settings.telemetry.log_json

    format_simple = "%(asctime)s | %(name)s | %(levelname)s | %(message)s"

    config: dict[str, Any] = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "default": {
                "format": format_simple,
            },
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "default",
                "level": level,
                "stream": "ext://sys.stderr",
            },
        },
        "root": {
            "handlers": ["console"],
            "level": level,
        },
    }

    if structured:
        config["formatters"]["default"] = {
            "()": structlog.stdlib.ProcessorFormatter,
            "processors": [
                structlog.stdlib.ProcessorFormatter.remove_processors_meta,
                structlog.processors.JSONRenderer(),
            ],
            "foreign_pre_chain": [
                structlog.stdlib.add_log_level,
                structlog.stdlib.add_logger_name,
                structlog.stdlib.ExtraAdder(),
                structlog.processors.TimeStamper(fmt="iso", key="ts"),
            ],
        }

    dictConfig(config)
    logging.captureWarnings(True)
