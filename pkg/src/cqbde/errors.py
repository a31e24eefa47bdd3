"""Exception hierarchy shared across the package."""


class CQBDEError(Exception):
    """Base class for all package errors."""


class ConfigError(CQBDEError, ValueError):
    """Invalid algorithm or experiment configuration."""


class DataError(CQBDEError, ValueError):
    """Problem with a dataset's content or shape."""


class DegenerateSeed(CQBDEError, ValueError):
    """Logistic-map seed whose orbit collapses onto a fixed point."""


class DegenerateColumn(CQBDEError, ValueError):
    """Qubit column that is (0, 0) and cannot be normalized."""


class UnevaluatedSolution(CQBDEError, ValueError):
    """A solution was used where a trained model and AUC are required."""


class SingleClassPartition(DataError):
    """Training labels contain only one class."""


class SingleClassLabels(DataError):
    """Evaluation labels contain only one class."""


class NoFeatures(DataError):
    """A feature mask with no set bits was passed to training."""


class DimensionMismatch(DataError):
    """Model feature indices do not fit the data."""


class TooFewSamplesPerClass(DataError):
    """A class has too few rows for the requested split or partition."""


class ParseError(DataError):
    """Malformed dataset file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LabelDomainError(DataError):
    """Labels outside {0, 1} (or {-1, +1})."""
