"""Exception hierarchy.

Every error derives from :class:`CamaError` and from the builtin it most
resembles, so callers can catch either.
"""


class CamaError(Exception):
    """Base class for all engine errors."""


class DomainError(CamaError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UndefinedMetricError(CamaError, ValueError):
    """The metric is undefined for this cohort (e.g. a single class)."""


class PreconditionError(CamaError, ValueError):
    """A documented precondition of an operation was violated."""


class NotFoundError(CamaError, KeyError):
    """A sample id does not exist."""


class DegenerateTaskError(CamaError, ValueError):
    """Pre- and post-acquisition metrics coincide; normalized gain is undefined."""


class ConfigurationError(CamaError, ValueError):
    """A run configuration cannot be satisfied by the given inputs."""


class DataFormatError(CamaError, ValueError):
    """A file does not follow its schema.

    ``line`` is the 1-based line number in the file (header is line 1) and
    ``column`` the offending column name, when known.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
