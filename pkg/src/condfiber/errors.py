"""Exception hierarchy shared by every module."""


class CondFiberError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CondFiberError, ValueError):
    """Bad input: malformed problem, inconsistent conditionals, bad argument."""


class StructureError(ValidationError):
    """Evidence that admits no DAG representation (a directed cycle)."""


class ResourceLimitError(CondFiberError):
    """An enumeration would exceed its configured cap.

    ``count`` holds the exact size that was refused, when it is known.
    """

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class UnsupportedError(CondFiberError):
    """The request is well-formed but outside what is implemented."""


class InvariantError(CondFiberError):
    """Two independent computations that must agree did not."""
