"""Logging for scorebench: rich console output on stderr, optional plain log file."""

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER_NAME = "scorebench"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """Configure the ``scorebench`` logger.

    Console records go to stderr so the rich tables printed by the CLI stay on
    stdout. Python warnings raised inside optimisers (overflow in a likelihood
    evaluation, say) are routed through ``py.warnings`` onto the same handlers.
    Calling this again replaces the handlers of the previous call.

    Args:
        level: Logging level name
        log_file: Also append records to this file
    """
    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.setLevel(level.upper())

    warnings_logger = logging.getLogger("py.warnings")
    for target in (logger, warnings_logger):
        for handler in target.handlers[:]:
            target.removeHandler(handler)
            handler.close()

    console_handler = RichHandler(
        console=Console(stderr=True),
        rich_tracebacks=True,
        markup=False,
        show_time=False,
        show_path=False,
    )
    console_handler.setFormatter(logging.Formatter("%(message)s"))
    handlers: list[logging.Handler] = [console_handler]

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        handlers.append(file_handler)

    for handler in handlers:
        logger.addHandler(handler)
        warnings_logger.addHandler(handler)
    warnings_logger.setLevel(logging.WARNING)
    warnings_logger.propagate = False
    logging.captureWarnings(True)
    return logger


@contextmanager
def log_duration(logger: logging.Logger, label: str) -> Iterator[None]:
    """Log how long the enclosed block took, at INFO."""
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.info(f"{label} took {time.perf_counter() - start:.1f}s")
