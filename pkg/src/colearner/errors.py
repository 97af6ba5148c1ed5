"""Exception types shared across the package.

All are ValueError/RuntimeError subclasses so callers that do not care about
the distinction can catch the builtin bases.
"""


class InvalidDatasetError(ValueError):
    """A dataset is malformed or degenerate for the requested operation."""


class DimensionError(ValueError):
    """A vector or matrix has the wrong length/shape."""


class ParameterError(ValueError):
    """A configuration value is out of its documented range."""


class EmptySetError(ValueError):
    """An operation that needs a non-empty collection received an empty one."""


class InvalidDataError(ValueError):
    """Training data is empty or contains non-finite values."""


class DataError(ValueError):
    """A results file is missing columns or contains unparseable values."""


class NumericError(RuntimeError):
    """A numerical routine failed beyond its documented fallbacks."""
