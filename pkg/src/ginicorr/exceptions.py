"""Error taxonomy shared by the library, the CLI, and downstream wrappers.

Class names double as the stable error identifiers printed by the CLI
(``type(err).__name__``), so renaming one is a breaking change.
"""


class GiniCorrError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(GiniCorrError):
    """Arguments violate a documented precondition (shape, range, flags)."""


class InsufficientData(GiniCorrError):
    """Fewer observations than the operation requires."""


class InsufficientClassSize(GiniCorrError):
    """A class has too few members for the requested estimator."""


class DegenerateSample(GiniCorrError):
    """The overall Gini mean difference is zero, so the correlation is undefined."""


class ResourceLimit(GiniCorrError):
    """The cached-distance strategy would exceed the configured memory cap."""


class ParseError(GiniCorrError):
    """A delimited-text cell could not be interpreted; carries row/column coordinates."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyAfterFiltering(GiniCorrError):
    """Every row was removed by the missing-value policy."""
