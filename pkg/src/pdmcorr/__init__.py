"""Classical and quantum quasi-free particles with position-dependent mass."""

from .errors import (
    BlowupReached,
    CollapseToCenter,
    ConvergenceFailure,
    DomainError,
    NoRealRoots,
    NonFiniteState,
    NotBound,
    NumericalError,
    PDMError,
    PreconditionError,
    StepFailure,
)
from .numerics import IntegratorConfig, Trajectory, eigen_tridiagonal, find_turning_points, integrate
from .profiles import Constant, Custom, Exponential1D, MassProfile, PowerLaw2D, Rational1D, Rational2D
from .quantum import OrderingScheme, builtin_schemes, coefficients, scheme_by_name

__version__ = "0.1.0"

__all__ = [
    "BlowupReached",
    "CollapseToCenter",
    "Constant",
    "ConvergenceFailure",
    "Custom",
    "DomainError",
    "Exponential1D",
    "IntegratorConfig",
    "MassProfile",
    "NoRealRoots",
    "NonFiniteState",
    "NotBound",
    "NumericalError",
    "OrderingScheme",
    "PDMError",
    "PowerLaw2D",
    "PreconditionError",
    "Rational1D",
    "Rational2D",
    "StepFailure",
    "Trajectory",
    "builtin_schemes",
    "coefficients",
    "eigen_tridiagonal",
    "find_turning_points",
    "integrate",
    "scheme_by_name",
]
