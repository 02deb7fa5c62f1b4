"""Exception hierarchy.

``DataError`` subclasses signal bad input data (the CLI maps them to exit
code 2); everything else is a programming or budget error.
"""


class SchreierError(Exception):
    pass


class DataError(SchreierError, ValueError):
    pass


class NotAPermutation(DataError):
    pass


class LengthMismatch(DataError):
    pass


class VertexOutOfRange(DataError, IndexError):
    pass


class ShapeMismatch(DataError):
    pass


class BadParameter(DataError):
    pass


class BadCode(DataError):
    pass


class ColorCountMismatch(DataError):
    pass


class NotOrthonormal(DataError):
    pass


class DimensionTooSmall(DataError):
    pass


class BudgetExceeded(SchreierError):
    pass
