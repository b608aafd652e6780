"""Exception hierarchy shared by all pdmcorr modules."""


class PDMError(Exception):
    """Base class for every error raised by pdmcorr."""


class PreconditionError(PDMError, ValueError):
    """Input violates an operation's stated precondition."""


class DomainError(PreconditionError):
    """Mass profile evaluated outside its domain (non-positive or singular)."""


class NumericalError(PDMError, ArithmeticError):
    """Base for failures of the numerical kernels."""


class StepFailure(NumericalError):
    """Step size underflowed during ODE integration."""


class CollapseToCenter(StepFailure):
    """Polar integration failed while approaching r = 0."""


class NonFiniteState(NumericalError):
    """Right-hand side produced NaN or Inf."""


class ConvergenceFailure(NumericalError):
    """Iterative eigensolver hit its iteration cap."""


class BlowupReached(PreconditionError):
    """Closed-form trajectory queried at or past its finite-time singularity."""


class NoRealRoots(PreconditionError):
    """Confinement quadratic has no real roots for the supplied invariants."""


class NotBound(PDMError):
    """Spectrum requested for a potential that admits no bound states."""

    def __init__(self, message, quantum_class=None):
        super().__init__(message)
        self.quantum_class = quantum_class
