"""Exception hierarchy shared by all modules."""


class NRFlowError(Exception):
    """Base class for every error raised by nrflow."""

    exit_code = 1


class ArgumentError(NRFlowError, ValueError):
    """Bad dimensions, out-of-range parameters, unknown names."""

    exit_code = 3


class ValidationError(ArgumentError):
    """A configuration document violates a field requirement or invariant."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnsupportedOperationError(NRFlowError, TypeError):
    exit_code = 3


class NumericError(NRFlowError, ArithmeticError):
    """Non-finite values, non-convergence."""

    exit_code = 4


class DivergenceError(NumericError):
    """State norm crossed the overflow guard during integration."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class SingularityError(NRFlowError, ArithmeticError):
    """A matrix that must be inverted is (numerically) singular."""

    exit_code = 5

    def __init__(self, message, matrix=None, time=None):
        super().__init__(message)
        self.matrix = matrix
        self.time = time


class SingularJacobianError(SingularityError):
    pass
