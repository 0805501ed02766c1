"""Exception hierarchy shared by all numerical modules."""


class CTCError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CTCError, ValueError):
    """An argument lies outside the domain of the function."""


class PreconditionError(CTCError, ValueError):
    """A documented precondition on the inputs was violated."""


class DegenerateCouplingError(CTCError, ZeroDivisionError):
    """The coupling scalar xi vanishes so the nonzero solution does not exist."""


class NoRootError(CTCError, ValueError):
    """The requested right-hand side is outside the range of the branch."""


class AccuracyError(CTCError, ArithmeticError):
    """A series or quadrature failed to reach the requested accuracy.

    ``estimates`` holds the last two estimates (or partial sums) so callers
    can judge how far off the result is.
    """

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class DivergenceError(CTCError, ArithmeticError):
    """An iteration blew up; ``iteration`` is the index at which it was seen."""

    def __init__(self, message, iteration=None, trace=None):
        super().__init__(message)
        self.iteration = iteration
        self.trace = trace


class BlowUpError(CTCError, ArithmeticError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message, time=None, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory
