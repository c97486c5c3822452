# core/errors.py
from typing import Optional


class IPBoostError(Exception):
    """Base class for every error raised by this package."""


class DatasetError(IPBoostError):
    pass


class DatasetFormatError(DatasetError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SimplexError(IPBoostError):
    pass


class DimensionMismatchError(SimplexError):
    pass


class InvalidBoundsError(SimplexError):
    pass


class IterationLimitError(SimplexError):
    """The simplex loop hit its iteration cap without reaching a verdict."""


class NonOptimalSolutionError(IPBoostError):
    pass


class NoFeasibleSolutionError(IPBoostError):
    pass


class InvalidEnsembleError(IPBoostError):
    pass


class ModelFormatError(IPBoostError):
    pass
