"""Exception hierarchy shared by every module of the package."""


class SubHankelError(Exception):
    """Base class for all errors raised by :mod:`subhankel`."""


class ContextError(SubHankelError, ValueError):
    """Variable names that are unknown, unbound or ordered inconsistently."""


class NotDivisible(SubHankelError, ArithmeticError):
    """Raised by :func:`exact_divide` when no polynomial quotient exists."""


class DivisionByZero(SubHankelError, ZeroDivisionError):
    pass


class ShapeError(SubHankelError, ValueError):
    pass


class SizeError(SubHankelError, ValueError):
    pass


class SingularPointError(SubHankelError, ValueError):
    """A point lies on the singular set (some relative invariant vanishes)."""


class ParseError(SubHankelError, ValueError):
    def __init__(self, message, text="", line=1, column=1):
        self.text = text
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class NotBIdentity(SubHankelError):
    """The operator result is not a y-free multiple of the shifted power."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message if witness is None else f"{message}: {witness}")


class Unsupported(SubHankelError):
    """A computation fell outside what the formal-power representation can carry."""

    def __init__(self, message, diagnostic=None):
        self.diagnostic = dict(diagnostic or {})
        super().__init__(message)
