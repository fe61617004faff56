"""Logging setup."""

import logging
import sys
from typing import Optional

from .config import get_settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def configure_logging(level: Optional[str] = None) -> None:
    """
    Send package logs to stderr.

    Args:
        level: Level name; defaults to the configured ``log_level`` setting
    """
    if level is None:
        level = get_settings().log_level

    root = logging.getLogger("drawdown_optimizer")
    root.setLevel(level.upper())
    for h in root.handlers:
        if getattr(h, "_drawdown_handler", False):
            # sys.stderr may have been replaced since the handler was added
            h.setStream(sys.stderr)  # type: ignore[attr-defined]
            return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._drawdown_handler = True  # type: ignore[attr-defined]
    root.addHandler(handler)
