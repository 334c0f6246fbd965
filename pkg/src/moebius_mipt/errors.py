"""Exception types raised by the library."""


class MobiusError(Exception):
    """Base class for all library errors."""


class SingularMatrix(MobiusError, ArithmeticError):
    pass


class DomainError(MobiusError, ValueError):
    pass


class NonRealTrace(MobiusError, ValueError):
    pass


class DimensionError(MobiusError, ValueError):
    pass


class InsufficientData(MobiusError, ValueError):
    pass


class NonPositiveEntropy(MobiusError, ValueError):
    pass


class SizeLimit(MobiusError, ValueError):
    pass


class DegenerateEigenvectors(MobiusError, ArithmeticError):
    """Matrix is a nontrivial Jordan block (parabolic and not +-identity)."""


class EigSolverFailure(MobiusError, ArithmeticError):
    pass


class ConfigError(MobiusError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


# exceptions that the CLI maps to the "numerical failure" exit code
NUMERICAL_ERRORS = (SingularMatrix, EigSolverFailure, DegenerateEigenvectors, NonRealTrace)
