"""Utils package for logging and shared exceptions."""
from .logger import setup_logger, logger
from .errors import (
    FabricError,
    ConfigError,
    RangeError,
    UnknownEntity,
    InvalidDemand,
    TableFormatError,
    InvalidTable,
    BudgetExhausted,
)

__all__ = [
    "setup_logger",
    "logger",
    "FabricError",
    "ConfigError",
    "RangeError",
    "UnknownEntity",
    "InvalidDemand",
    "TableFormatError",
    "InvalidTable",
    "BudgetExhausted",
]
