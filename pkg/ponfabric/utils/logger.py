"""
Logging utility for the fabric toolkit.
Provides one named logger with a fixed format, shared by every service.
"""
import logging
import sys
from pathlib import Path
from typing import Optional

FORMATTER = logging.Formatter(
    fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S"
)


def _has_file_handler(logger: logging.Logger, log_file: str) -> bool:
    target = str(Path(log_file).resolve())
    return any(
        isinstance(handler, logging.FileHandler) and handler.baseFilename == target
        for handler in logger.handlers
    )


def setup_logger(
    name: str = "ponfabric",
    level: int = logging.WARNING,
    log_file: Optional[str] = None
) -> logging.Logger:
    """
    Sets up and configures a logger instance.

    Records go to stderr so that command output on stdout stays
    byte-identical between runs. Calling again reconfigures the level
    and adds the file handler if one is asked for.

    Args:
        name: Name of the logger
        level: Logging level (e.g., logging.INFO, logging.DEBUG)
        log_file: Optional file path to write logs to

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False

    # Prevent duplicate console handlers
    if not logger.handlers:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(FORMATTER)
        logger.addHandler(console_handler)

    if log_file and not _has_file_handler(logger, log_file):
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(FORMATTER)
        logger.addHandler(file_handler)

    for handler in logger.handlers:
        handler.setLevel(level)

    return logger


# Create default logger instance
logger = setup_logger()
