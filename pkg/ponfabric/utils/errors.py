"""
Exception hierarchy for the fabric toolkit.
"""
from typing import Any, Optional


class FabricError(ValueError):
    """Base class for every error raised by the toolkit."""


class ConfigError(FabricError):
    """A configuration value is missing, malformed, or out of bounds."""


class RangeError(FabricError):
    """A wavelength, time slot or attachment index lies outside the fabric."""


class UnknownEntity(FabricError):
    """An entity name is not part of the topology."""


class InvalidDemand(FabricError):
    """A communication pair cannot be served (e.g. a self pair)."""


class TableFormatError(FabricError):
    """A table or traffic file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidTable(FabricError):
    """An assignment table failed validation; carries the report."""

    def __init__(self, report: Any):
        self.report = report
        super().__init__(f"assignment table is invalid ({len(report.violations)} violations)")


class BudgetExhausted(FabricError):
    """The exact search hit its node budget before completing."""

    def __init__(self, message: str, outcome: Any = None):
        self.outcome = outcome
        super().__init__(message)
