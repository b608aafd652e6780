"""von Roos kinetic-energy orderings and the Pöschl-Teller potentials they induce.

Ordering triples ``(j, k, l)`` obey ``j + k + l = -1``.  All coefficients are
kept as :class:`fractions.Fraction` so that the free/bound boundary (an exact
zero) is never blurred by rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import PreconditionError

Number = Union[int, float, str, Fraction]


def as_fraction(value: Number) -> Fraction:
    """Exact rational for ints, fraction strings and (decimal repr of) floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise PreconditionError("boolean is not a valid ordering parameter")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise PreconditionError(f"non-finite ordering parameter {value}")
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip().replace("−", "-"))
    except (ValueError, ZeroDivisionError):
        raise PreconditionError(f"cannot read {value!r} as a rational number") from None


def format_exact(q: Fraction) -> str:
    """``"0.3125 (5/16)"`` style rendering: decimal plus exact fraction."""
    dec = repr(float(q))
    if dec.endswith(".0"):
        dec = dec[:-2]
    return f"{dec} ({q.numerator}/{q.denominator})"


@dataclass(frozen=True)
class OrderingScheme:
    name: str
    j: Fraction
    k: Fraction
    l: Fraction

    def __post_init__(self):
        for attr in ("j", "k", "l"):
            object.__setattr__(self, attr, as_fraction(getattr(self, attr)))
        if self.j + self.k + self.l != -1:
            raise PreconditionError(
                f"ordering ({self.j}, {self.k}, {self.l}) violates j + k + l = -1"
            )

    @classmethod
    def from_jk(cls, name: str, j: Number, k: Number, l: Optional[Number] = None) -> "OrderingScheme":
        """Complete ``l = -1 - j - k`` when it is not given."""
        j, k = as_fraction(j), as_fraction(k)
        if l is None:
            l = -1 - j - k
        return cls(name, j, k, l)

    def mirrored(self) -> "OrderingScheme":
        return OrderingScheme(self.name + "~", self.l, self.k, self.j)


ZHU_KROEMER = OrderingScheme("ZhuKroemer", Fraction(-1, 2), 0, Fraction(-1, 2))
MUSTAFA_MAZHARIMOUSAVI = OrderingScheme("MustafaMazharimousavi", Fraction(-1, 4), Fraction(-1, 2), Fraction(-1, 4))
BEN_DANIEL_DUKE = OrderingScheme("BenDanielDuke", 0, -1, 0)
GORA_WILLIAMS = OrderingScheme("GoraWilliams", -1, 0, 0)
LI_KUHN = OrderingScheme("LiKuhn", 0, Fraction(-1, 2), Fraction(-1, 2))

_ALIASES = {
    "zk": ZHU_KROEMER,
    "zhukroemer": ZHU_KROEMER,
    "mm": MUSTAFA_MAZHARIMOUSAVI,
    "mustafamazharimousavi": MUSTAFA_MAZHARIMOUSAVI,
    "bdd": BEN_DANIEL_DUKE,
    "bendanielduke": BEN_DANIEL_DUKE,
    "bendanieldduke": BEN_DANIEL_DUKE,
    "gw": GORA_WILLIAMS,
    "gorawilliams": GORA_WILLIAMS,
    "gorawilliam": GORA_WILLIAMS,
    "lk": LI_KUHN,
    "likuhn": LI_KUHN,
}


def builtin_schemes() -> list:
    return [ZHU_KROEMER, MUSTAFA_MAZHARIMOUSAVI, BEN_DANIEL_DUKE, GORA_WILLIAMS, LI_KUHN]


def scheme_by_name(name: str) -> OrderingScheme:
    key = "".join(ch for ch in name.lower() if ch.isalnum())
    try:
        return _ALIASES[key]
    except KeyError:
        known = ", ".join(s.name for s in builtin_schemes())
        raise PreconditionError(f"unknown ordering {name!r}; built-ins: {known}") from None


@dataclass(frozen=True)
class AmbiguityCoefficients:
    a: Fraction
    b: Fraction
    xi: Fraction

    @property
    def well_1d(self) -> Fraction:
        """``5a - 4b``: sign decides bound / free / unphysical in one dimension."""
        return 5 * self.a - 4 * self.b


def coefficients(s: OrderingScheme) -> AmbiguityCoefficients:
    j, k, l = s.j, s.k, s.l
    a = (1 + 2 * k) / 4
    b = Fraction(9, 16) + j * (j + k + 1) + k
    xi = j * (j - 1) + l * (l - 1) - k * (k + 1)
    return AmbiguityCoefficients(a, b, xi)


class QuantumKind(enum.Enum):
    BOUND_STATES = "BoundStates"
    FREE = "Free"
    UNPHYSICAL = "Unphysical"
    NOT_BOUND = "NotBound"


@dataclass(frozen=True)
class QuantumClass:
    kind: QuantumKind
    lam: Optional[float] = None  # lambda of the 1/cos^2 term when bound
    lam_sin: Optional[float] = None  # lambda of the 1/sin^2 term (2D)
    detail: str = ""

    @property
    def bound(self) -> bool:
        return self.kind is QuantumKind.BOUND_STATES

    def __str__(self):
        if self.bound:
            if self.lam_sin is not None:
                return f"BoundStates(lambda_cos={self.lam:.10g}, lambda_sin={self.lam_sin:.10g})"
            return f"BoundStates(lambda={self.lam:.10g})"
        return self.kind.value


def lambda_from_strength(strength: float) -> float:
    """Root ``lambda >= 1/2`` of ``lambda (lambda - 1) = strength``."""
    disc = 1 + 4 * strength
    if disc < 0:
        raise PreconditionError(f"lambda(lambda-1) = {strength} has no real root")
    return 0.5 * (1 + math.sqrt(disc))


@dataclass(frozen=True)
class EffectivePotential:
    """Pöschl-Teller well on ``domain`` with Dirichlet walls at both ends.

    Hamiltonian: ``-kinetic d^2/dz^2 + well/cos^2 z + centrifugal/sin^2 z``;
    physical energies are ``E = backmap_scale * level + backmap_offset``.
    """

    dimension: str  # "1d" or "2d-radial"
    well_coeff: float
    centrifugal_coeff: float
    domain: tuple
    kinetic: float
    mass_scale: float
    backmap_scale: float
    backmap_offset: float
    quantum_class: QuantumClass
    well_exact: Fraction = Fraction(0)
    centrifugal_exact: Fraction = Fraction(0)
    s_state_excluded: bool = False
    notes: tuple = field(default_factory=tuple)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        v = self.well_coeff / np.cos(z) ** 2
        if self.centrifugal_coeff:
            v = v + self.centrifugal_coeff / np.sin(z) ** 2
        return v

    def to_physical(self, level):
        return self.backmap_scale * np.asarray(level, dtype=float) + self.backmap_offset

    def to_scaled(self, energy):
        return (np.asarray(energy, dtype=float) - self.backmap_offset) / self.backmap_scale


WALL_NOTE = (
    "walls sit at the z-domain ends; the coordinate map z = arctan(c x) reaches them only as "
    "x -> infinity, so no finite x (or r) confinement range is asserted"
)


def classify_1d(s: OrderingScheme) -> QuantumClass:
    w = coefficients(s).well_1d
    if w > 0:
        return QuantumClass(QuantumKind.BOUND_STATES, lam=lambda_from_strength(float(4 * w)))
    if w == 0:
        return QuantumClass(QuantumKind.FREE, detail="5a-4b = 0: no effective potential")
    return QuantumClass(QuantumKind.UNPHYSICAL, detail=f"5a-4b = {w} < 0: attractive 1/cos^2 singularity")


def effective_potential_1d(s: OrderingScheme, B: float, m0: float) -> EffectivePotential:
    """Well ``2(5a-4b)/(m0 cos^2 z)`` on ``(-pi/2, pi/2)`` for ``m = m0/(1+B^2x^2)^2``."""
    if B == 0:
        raise PreconditionError("B must be non-zero")
    if not m0 > 0:
        raise PreconditionError("m0 must be positive")
    c = coefficients(s)
    well = 2 * c.well_1d / as_fraction(m0)
    shift = 4 * (3 * c.a - 2 * c.b) / as_fraction(m0)
    return EffectivePotential(
        dimension="1d",
        well_coeff=float(well),
        centrifugal_coeff=0.0,
        domain=(-math.pi / 2, math.pi / 2),
        kinetic=1 / (2 * m0),
        mass_scale=m0,
        backmap_scale=B * B,
        backmap_offset=-B * B * float(shift),
        quantum_class=classify_1d(s),
        well_exact=well,
        notes=(WALL_NOTE,),
    )


def _bracket_2d(c: AmbiguityCoefficients, k: Fraction, m_quantum: int) -> Fraction:
    return 8 * c.xi - 8 * k - 12 - m_quantum**2 + Fraction(1, 4)


def eta_shift(s: OrderingScheme) -> Fraction:
    """Constant in ``eta = 2 E C~ / C^2 + shift`` for the rational radial mass."""
    c = coefficients(s)
    return -8 * c.xi + 12 * s.k + 13


def classify_2d(s: OrderingScheme, m_quantum: int) -> QuantumClass:
    """Bound iff ``8xi - 8k - 12 - m^2 + 1/4 < 0`` and ``m^2 - 1/4 > 0``."""
    m_quantum = _as_int(m_quantum)
    c = coefficients(s)
    bracket = _bracket_2d(c, s.k, m_quantum)
    centrifugal = m_quantum**2 - Fraction(1, 4)
    if centrifugal <= 0:
        return QuantumClass(QuantumKind.NOT_BOUND, detail="S-state (m = 0) excluded: m^2 - 1/4 <= 0")
    if bracket < 0:
        return QuantumClass(
            QuantumKind.BOUND_STATES,
            lam=lambda_from_strength(float(-bracket)),
            lam_sin=0.5 + abs(m_quantum),
        )
    return QuantumClass(QuantumKind.NOT_BOUND, detail=f"8xi-8k-12-m^2+1/4 = {bracket} >= 0")


def effective_potential_2d(s: OrderingScheme, m_quantum: int, C: float, m0: float, r0: float) -> EffectivePotential:
    """Radial well ``(m^2-1/4)/sin^2 z - (8xi-8k-12-m^2+1/4)/cos^2 z`` on ``(0, pi/2)``."""
    if C == 0:
        raise PreconditionError("C must be non-zero")
    if not m0 > 0:
        raise PreconditionError("m0 must be positive")
    if not r0 >= 0:
        raise PreconditionError("r0 must be non-negative")
    m_quantum = _as_int(m_quantum)
    c = coefficients(s)
    well = -_bracket_2d(c, s.k, m_quantum)
    centrifugal = m_quantum**2 - Fraction(1, 4)
    c_tilde = m0 * (1 + C * C * r0 * r0) ** 2
    scale = C * C / (2 * c_tilde)
    return EffectivePotential(
        dimension="2d-radial",
        well_coeff=float(well),
        centrifugal_coeff=float(centrifugal),
        domain=(0.0, math.pi / 2),
        kinetic=1.0,
        mass_scale=c_tilde,
        backmap_scale=scale,
        backmap_offset=-scale * float(eta_shift(s)),
        quantum_class=classify_2d(s, m_quantum),
        well_exact=well,
        centrifugal_exact=centrifugal,
        s_state_excluded=centrifugal <= 0,
        notes=(WALL_NOTE,),
    )


def pct_coordinate_2d(C: float, m0: float, r0: float, r: float) -> float:
    """Angle ``z = arctan(C r)`` in ``[0, pi/2)``."""
    if r < 0:
        raise PreconditionError("r must be non-negative")
    return math.atan(abs(C) * r)


def _as_int(m):
    if int(m) != m:
        raise PreconditionError(f"magnetic quantum number must be an integer, got {m}")
    return int(m)
