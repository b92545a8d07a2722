from __future__ import annotations

import logging
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

from entrocert.config import get_settings


ROOT_LOGGER = "entrocert"

_handler: Optional[RichHandler] = None


def init_logging(level: Optional[str] = None) -> logging.Logger:
    """Install the rich handler once; later calls only adjust the level."""
    global _handler
    logger = logging.getLogger(ROOT_LOGGER)
    if _handler is None:
        _handler = RichHandler(
            console=Console(stderr=True),
            show_path=get_settings().DEBUG,
            rich_tracebacks=True,
        )
        _handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(_handler)
        logger.propagate = False
    logger.setLevel((level or get_settings().LOG_LEVEL).upper())
    return logger


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def close_logging() -> None:
    global _handler
    if _handler is not None:
        try:
            logging.getLogger(ROOT_LOGGER).removeHandler(_handler)
        finally:
            _handler = None
