"""Exception hierarchy shared by every module."""


class SynstripError(Exception):
    """Base class for all library errors."""


class ShapeError(SynstripError, ValueError):
    """Operands have incompatible shapes."""


class ConfigError(SynstripError, ValueError):
    """An experiment or component configuration is invalid."""


class DataError(SynstripError, ValueError):
    """Labels or features violate a data contract."""


class UsageError(SynstripError, ValueError):
    """An API was called out of order or with invalid indices."""


class NumericError(SynstripError, ArithmeticError):
    """A non-finite value appeared during optimization."""


class IngestionError(SynstripError, IOError):
    """A dataset file is missing or truncated."""

    def __init__(self, message, path=None, offset=None):
        super().__init__(message)
        self.path = path
        self.offset = offset


class FormatError(SynstripError, ValueError):
    """A binary file does not carry the expected magic or layout."""
