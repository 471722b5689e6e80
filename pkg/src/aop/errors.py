"""Exception hierarchy shared by every module of the package."""


class AopError(Exception):
    """Base class for all errors raised by :mod:`aop`."""


class NonFiniteEntry(AopError, ValueError):
    pass


class DimensionTooSmall(AopError, ValueError):
    pass


class NoIsometryExists(AopError, ValueError):
    """Raised when the domain is larger than the codomain (``cols > rows``).

    No column-orthonormal ``rows x cols`` matrix exists in that case, so the set
    of scalar multiples of isometries of that shape is ``{0}`` at best and the
    nearness machinery does not apply.  Right-invertible but non-invertible
    operators only occur in this shape for matrices, so they land here too.
    """


class NotSquare(AopError, ValueError):
    pass


class NotOrthogonal(AopError, ValueError):
    pass


class ZeroVector(AopError, ValueError):
    pass


class ZeroOperator(AopError, ValueError):
    pass


class OutOfRange(AopError, ValueError):
    pass


class NotAop(AopError, ValueError):
    """The operator is not bounded below, so no eps < 1 works."""


class NotReal2x2(AopError, ValueError):
    pass


class BadTruncation(AopError, ValueError):
    pass


class DegenerateDraw(AopError, RuntimeError):
    pass


class DegenerateKernelChoice(AopError, RuntimeError):
    pass


class InternalInconsistency(AopError, RuntimeError):
    """Two routes to the same quantity disagreed beyond tolerance."""


class OutOfScope(AopError, NotImplementedError):
    """The requested quantity only exists for infinite-dimensional operators."""


class ParseError(AopError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
