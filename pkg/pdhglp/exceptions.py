"""Exceptions raised by pdhglp.

Problem validation failures use Django's ``ValidationError`` (carrying the full list of
violations); everything else raised by the package derives from ``PdhgLpError``.
"""


class PdhgLpError(Exception):
    """Base class of all pdhglp errors."""


class DimensionError(PdhgLpError, ValueError):
    """A vector or matrix does not have the length/shape an operation needs."""


class ProblemParameterError(PdhgLpError, ValueError):
    """A generator, scaling or solver parameter is out of range."""


class MpsParseError(PdhgLpError, ValueError):

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        self.reason = message
        if line_number is not None:
            message = "line {}: {}".format(line_number, message)
        super().__init__(message)


class JsonProblemError(PdhgLpError, ValueError):
    """A JSON problem document does not follow the problem schema."""


class BatchShapeError(PdhgLpError, ValueError):

    def __init__(self, index, message):
        self.index = index
        super().__init__("batch member {}: {}".format(index, message))


class InnerSolveError(PdhgLpError, RuntimeError):
    """An LP solved inside a loss or metric did not reach optimality."""

    def __init__(self, index, status):
        self.index = index
        self.status = status
        super().__init__("inner solve of batch member {} ended with status {}".format(index, status))


class UndefinedMetricError(PdhgLpError, ValueError):
    """A metric's denominator is zero."""
