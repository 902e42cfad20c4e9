"""Exception types shared across the package."""


class SketchLSError(Exception):
    """Base class for all package errors."""


class DimensionError(SketchLSError, ValueError):
    """Shapes do not satisfy an operation's preconditions."""


class RankDeficientError(SketchLSError, ArithmeticError):
    """A triangular factor has a (numerically) zero pivot.

    ``index`` is the zero-based column whose diagonal entry fell below the
    rank tolerance.
    """

    def __init__(self, index, message=None, *, context=None):
        self.index = index
        self.context = dict(context or {})
        if message is None:
            message = f"rank-deficient matrix: |R[{index},{index}]| below tolerance"
        if self.context:
            extra = ", ".join(f"{k}={v}" for k, v in self.context.items())
            message = f"{message} ({extra})"
        super().__init__(message)


class DataError(SketchLSError, ValueError):
    """Input data (CSV tables, datasets) is malformed or incomplete."""
