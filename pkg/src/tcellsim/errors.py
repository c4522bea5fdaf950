"""Exception types shared across the package."""


class DataError(Exception):
    """Input data is missing, unreadable or fails validation."""


class NumericalError(Exception):
    """A simulation produced a non-finite state and was aborted."""
