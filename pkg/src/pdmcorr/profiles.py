"""Position-dependent mass profiles with analytic first and second derivatives."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate, special

from .errors import DomainError, PreconditionError


class ForceClass(enum.Enum):
    DAMPING = "Damping"
    ANTI_DAMPING = "AntiDamping"
    NEUTRAL = "Neutral"


class MassProfile:
    """Base class.  Subclasses implement :meth:`_eval` and :meth:`_check`."""

    family = "custom"
    dimension = 1

    def eval(self, x: float):
        """Return ``(m, m', m'')`` at ``x``."""
        self._check(x)
        m, dm, d2m = self._eval(x)
        if not (m > 0 and math.isfinite(m)):
            raise DomainError(f"{self.family}: mass {m} is not positive and finite at x={x}")
        return m, dm, d2m

    def __call__(self, x: float) -> float:
        return self.eval(x)[0]

    def log_derivative(self, x: float) -> float:
        m, dm, _ = self.eval(x)
        return dm / m

    def sqrt_mass_antiderivative(self, x: float) -> float:
        """Some ``F`` with ``F' = sqrt(m)``; numeric quadrature from 0 by default."""
        self._check(x)
        val, _ = integrate.quad(lambda s: math.sqrt(self.eval(s)[0]), 0.0, x, epsabs=1e-13, epsrel=1e-13, limit=200)
        return val

    def _check(self, x):
        if not math.isfinite(x):
            raise DomainError(f"non-finite coordinate {x}")

    def _eval(self, x):
        raise NotImplementedError

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class Exponential1D(MassProfile):
    """``m(x) = m0 exp(2A x^(n+1) / (n+1))``, so that ``m'/m = 2A x^n``."""

    A: float
    n: int = 0
    m0: float = 1.0
    family = "exponential1d"

    def __post_init__(self):
        if self.A == 0:
            raise PreconditionError("A must be non-zero (A = 0 is the trivial constant mass)")
        if int(self.n) != self.n or self.n < 0:
            raise PreconditionError("n must be a non-negative integer")
        if not self.m0 > 0:
            raise PreconditionError("m0 must be positive")

    def _eval(self, x):
        A, n = self.A, int(self.n)
        m = self.m0 * math.exp(2 * A * x ** (n + 1) / (n + 1))
        ld = 2 * A * x**n
        dld = 2 * A * n * x ** (n - 1) if n > 0 else 0.0
        return m, m * ld, m * (ld * ld + dld)

    def log_derivative(self, x):
        self.eval(x)
        return 2 * self.A * x ** int(self.n)

    def sqrt_mass_antiderivative(self, x):
        A, n = self.A, int(self.n)
        if n == 0:
            return math.sqrt(self.m0) * math.exp(A * x) / A
        if n == 1:
            c = math.sqrt(abs(A) / 2)
            fn = special.erfi if A > 0 else special.erf
            return math.sqrt(self.m0) * float(fn(c * x)) / c * math.sqrt(math.pi) / 2
        return super().sqrt_mass_antiderivative(x)

    def params(self):
        return {"A": self.A, "n": self.n, "m0": self.m0}


@dataclass(frozen=True)
class Rational1D(MassProfile):
    """``m(x) = m0 / (1 + B^2 x^2)^2``."""

    B: float
    m0: float = 1.0
    family = "rational1d"

    def __post_init__(self):
        if self.B == 0:
            raise PreconditionError("B must be non-zero")
        if not self.m0 > 0:
            raise PreconditionError("m0 must be positive")

    def _eval(self, x):
        return _rational(self.m0, self.B, x)

    def log_derivative(self, x):
        self.eval(x)
        b2 = self.B * self.B
        return -4 * b2 * x / (1 + b2 * x * x)

    def sqrt_mass_antiderivative(self, x):
        return math.sqrt(self.m0) / self.B * math.atan(self.B * x)

    def params(self):
        return {"B": self.B, "m0": self.m0}


@dataclass(frozen=True)
class PowerLaw2D(MassProfile):
    """Radial ``g(r) = m0 (r/r0)^nu``, defined for ``r > 0``."""

    nu: float
    m0: float = 1.0
    r0: float = 1.0
    family = "powerlaw2d"
    dimension = 2

    def __post_init__(self):
        if not self.m0 > 0:
            raise PreconditionError("m0 must be positive")
        if not self.r0 > 0:
            raise PreconditionError("r0 must be positive")

    def _check(self, r):
        super()._check(r)
        if not r > 0:
            raise DomainError(f"power-law mass needs r > 0, got {r}")

    def _eval(self, r):
        nu = self.nu
        m = self.m0 * (r / self.r0) ** nu
        return m, nu * m / r, nu * (nu - 1) * m / (r * r)

    def log_derivative(self, r):
        self.eval(r)
        return self.nu / r

    def sqrt_mass_antiderivative(self, r):
        self._check(r)
        p = self.nu / 2 + 1
        lam = math.sqrt(self.m0) * self.r0 ** (-self.nu / 2)
        if p == 0:
            return lam * math.log(r)
        return lam * r**p / p

    def params(self):
        return {"nu": self.nu, "m0": self.m0, "r0": self.r0}


@dataclass(frozen=True)
class Rational2D(MassProfile):
    """Radial ``g(r) = C~ / (1 + C^2 r^2)^2`` with ``C~ = m0 (1 + C^2 r0^2)^2`` so that ``g(r0) = m0``."""

    C: float
    m0: float = 1.0
    r0: float = 1.0
    family = "rational2d"
    dimension = 2

    def __post_init__(self):
        if self.C == 0:
            raise PreconditionError("C must be non-zero")
        if not self.m0 > 0:
            raise PreconditionError("m0 must be positive")
        if not self.r0 >= 0:
            raise PreconditionError("r0 must be non-negative")

    @property
    def C_tilde(self) -> float:
        return self.m0 * (1 + self.C**2 * self.r0**2) ** 2

    def _check(self, r):
        super()._check(r)
        if r < 0:
            raise DomainError(f"radial mass needs r >= 0, got {r}")

    def _eval(self, r):
        return _rational(self.C_tilde, self.C, r)

    def log_derivative(self, r):
        self.eval(r)
        c2 = self.C * self.C
        return -4 * c2 * r / (1 + c2 * r * r)

    def sqrt_mass_antiderivative(self, r):
        self._check(r)
        return math.sqrt(self.C_tilde) / self.C * math.atan(self.C * r)

    def params(self):
        return {"C": self.C, "m0": self.m0, "r0": self.r0}


def _rational(scale, B, x):
    b2 = B * B
    u = 1 + b2 * x * x
    m = scale / (u * u)
    dm = -4 * b2 * x * scale / u**3
    d2m = scale * (20 * b2 * b2 * x * x - 4 * b2) / u**4
    return m, dm, d2m


class Custom(MassProfile):
    """User-supplied ``m``, ``m'`` and ``m''`` callables (no numerical differentiation)."""

    family = "custom"

    def __init__(self, m: Callable, dm: Callable, d2m: Callable, name: str = "custom", dimension: int = 1):
        if not (callable(m) and callable(dm) and callable(d2m)):
            raise PreconditionError("custom profiles must supply m, m' and m'' as callables")
        self._m, self._dm, self._d2m = m, dm, d2m
        self.name = name
        self.dimension = dimension

    def _eval(self, x):
        return float(self._m(x)), float(self._dm(x)), float(self._d2m(x))

    def __repr__(self):
        return f"Custom({self.name!r})"


class Constant(Custom):
    """Constant mass, the trivial reference case."""

    family = "constant"

    def __init__(self, m0: float = 1.0, dimension: int = 1):
        if not m0 > 0:
            raise PreconditionError("m0 must be positive")
        self.m0 = m0
        super().__init__(lambda x: m0, lambda x: 0.0, lambda x: 0.0, name="constant", dimension=dimension)

    def _check(self, x):
        super()._check(x)
        if self.dimension == 2 and not x > 0:
            raise DomainError(f"radial coordinate must be positive, got {x}")

    def sqrt_mass_antiderivative(self, x):
        return math.sqrt(self.m0) * x

    def params(self):
        return {"m0": self.m0}

    def __repr__(self):
        return f"Constant(m0={self.m0})"


BUILTIN_FAMILIES = {
    "exponential1d": Exponential1D,
    "rational1d": Rational1D,
    "powerlaw2d": PowerLaw2D,
    "rational2d": Rational2D,
}


def from_config(block: dict) -> MassProfile:
    """Build a profile from a config block with keys family, A, n, B, C, nu, m0, r0."""
    family = str(block.get("family", "")).lower().replace("_", "").replace("-", "")
    m0 = float(block.get("m0", 1.0))
    try:
        if family == "exponential1d":
            return Exponential1D(A=float(block["A"]), n=int(block.get("n", 0)), m0=m0)
        if family == "rational1d":
            return Rational1D(B=float(block["B"]), m0=m0)
        if family == "powerlaw2d":
            return PowerLaw2D(nu=float(block["nu"]), m0=m0, r0=float(block.get("r0", 1.0)))
        if family == "rational2d":
            return Rational2D(C=float(block["C"]), m0=m0, r0=float(block.get("r0", 1.0)))
        if family in ("constant", "constant1d", "constant2d"):
            return Constant(m0, dimension=2 if family == "constant2d" else 1)
    except KeyError as exc:
        raise PreconditionError(f"profile family {family!r} needs parameter {exc.args[0]}") from None
    raise PreconditionError(f"unknown profile family {block.get('family')!r}")


def force_sign_class(profile: MassProfile, x: float, xdot: float) -> ForceClass:
    """Whether the mass-gradient force ``-m'/(2m) xdot^2`` slows or speeds the motion."""
    ld = profile.log_derivative(x)
    if ld == 0 or xdot == 0:
        return ForceClass.NEUTRAL
    return ForceClass.DAMPING if ld * xdot > 0 else ForceClass.ANTI_DAMPING
