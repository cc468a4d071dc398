"""Exception hierarchy shared by all modules."""


class OperatorLabError(Exception):
    """Base class for every error raised by this package."""


class MatrixFormatError(OperatorLabError, ValueError):
    pass


class NotHermitian(OperatorLabError, ValueError):
    pass


class NotPSD(OperatorLabError, ValueError):
    pass


class NoConvergence(OperatorLabError, ArithmeticError):
    pass


class DomainError(OperatorLabError, ValueError):
    pass


class OrderViolated(OperatorLabError, ValueError):
    pass


class NotContraction(OperatorLabError, ValueError):
    pass


class Singular(OperatorLabError, ValueError):
    pass


class UnknownVertex(OperatorLabError, KeyError):
    pass


class WindowTooShort(OperatorLabError, ValueError):
    pass


class GenerationFailed(OperatorLabError, RuntimeError):
    pass


class BadParams(OperatorLabError, ValueError):
    pass
