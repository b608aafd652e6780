"""Classical quasi-free particle with position-dependent mass on a line.

The only force is the one generated by the mass gradient,
``m(x) xddot + m'(x) xdot^2 / 2 = 0``, which conserves the quasi-momentum
``Pi = sqrt(m(x)) xdot``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import BlowupReached, DomainError, PreconditionError, StepFailure
from .numerics import DIVERGED, IntegratorConfig, Trajectory, integrate
from .profiles import MassProfile, Rational1D


@dataclass(frozen=True)
class State1D:
    x: float
    xdot: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.xdot)):
            raise PreconditionError("state must be finite")


class Confinement1D(enum.Enum):
    CONFINED_FINITE = "ConfinedFinite"
    UNBOUNDED_FINITE_TIME_BLOWUP = "UnboundedFiniteTimeBlowup"
    UNBOUNDED_ASYMPTOTIC = "UnboundedAsymptotic"


@dataclass(frozen=True)
class ConfinementClass1D:
    kind: Confinement1D
    reached_range: Optional[tuple] = None
    t_blowup: Optional[float] = None

    @property
    def confined(self) -> bool:
        return self.kind is Confinement1D.CONFINED_FINITE

    def __str__(self):
        if self.kind is Confinement1D.UNBOUNDED_FINITE_TIME_BLOWUP:
            return f"{self.kind.value}(t_blowup={self.t_blowup:.10g})"
        if self.kind is Confinement1D.CONFINED_FINITE:
            lo, hi = self.reached_range
            return f"{self.kind.value}(range=[{lo:.10g}, {hi:.10g}])"
        return self.kind.value


RUNAWAY_FACTOR = 1e6


def acceleration(profile: MassProfile, s: State1D) -> float:
    return -0.5 * profile.log_derivative(s.x) * s.xdot**2


def quasi_momentum(profile: MassProfile, s: State1D) -> float:
    return math.sqrt(profile(s.x)) * s.xdot


def _rhs(profile):
    def rhs(t, y):
        x, v = y
        m, dm, _ = profile.eval(x)
        return np.array([v, -0.5 * dm / m * v * v])

    return rhs


def simulate(profile: MassProfile, s0: State1D, t_end: float, config: Optional[IntegratorConfig] = None) -> Trajectory:
    """Integrate the equation of motion from ``s0`` up to ``t_end``.

    Samples carry ``(Pi, mass)`` as invariants.  A run that blows up stops early
    with ``status == "diverged"``; this includes a step-size underflow while the
    speed runs away (more than ``RUNAWAY_FACTOR`` times the initial speed).
    """
    if s0.xdot == 0:
        raise PreconditionError("initial velocity must be non-zero; a particle at rest stays at rest")
    profile.eval(s0.x)

    def monitor(t, y):
        m = profile(y[0])
        return (math.sqrt(m) * y[1], m)

    try:
        return integrate(
            _rhs(profile),
            (s0.x, s0.xdot),
            (0.0, t_end),
            config,
            invariants=monitor,
            names=("x", "xdot"),
            invariant_names=("Pi", "mass"),
        )
    except StepFailure as exc:
        partial = getattr(exc, "partial", None)
        if partial is None or abs(partial.states[-1, 1]) < RUNAWAY_FACTOR * abs(s0.xdot):
            raise
        return replace(partial, status=DIVERGED)


def _rational_phase_rate(B: float, s0: State1D) -> float:
    # arctan(B x) advances at the constant rate B xdot0 / (1 + B^2 x0^2)
    return B * s0.xdot / (1 + (B * s0.x) ** 2)


def closed_form_rational(B: float, s0: State1D, t: float) -> float:
    """Exact trajectory ``x(t) = tan(w t + arctan(B x0)) / B`` of the rational mass.

    ``w = B xdot0 / (1 + B^2 x0^2)``, which is ``B xdot0`` for a start at the origin.
    """
    arg = _rational_phase_rate(B, s0) * t + math.atan(B * s0.x)
    if abs(arg) >= math.pi / 2:
        raise BlowupReached(f"t={t} is at or past the blow-up time {blowup_time_rational(B, s0)}")
    return math.tan(arg) / B


def blowup_time_rational(B: float, s0: State1D) -> float:
    """Time at which the rational-mass particle reaches infinity."""
    if s0.xdot == 0:
        return math.inf
    rate = _rational_phase_rate(B, s0)
    edge = math.copysign(math.pi / 2, rate)
    return (edge - math.atan(B * s0.x)) / rate


def closed_form_exponential_n0(A: float, s0: State1D, t: float) -> float:
    """Exact trajectory of ``m = m0 exp(2Ax)``: ``x = ln(A xdot0 e^(A x0) t + e^(A x0)) / A``."""
    w = math.exp(A * s0.x)
    arg = A * s0.xdot * w * t + w
    if not arg > 0:
        raise DomainError(f"log argument {arg} <= 0: the particle has already reached infinity")
    return math.log(arg) / A


def pct_coordinate(profile: MassProfile, x: float, x_ref: float = 0.0) -> float:
    """Point-canonical coordinate ``q(x) = int_{x_ref}^{x} sqrt(m)``."""
    if x == x_ref:
        profile.eval(x)
        return 0.0
    return profile.sqrt_mass_antiderivative(x) - profile.sqrt_mass_antiderivative(x_ref)


def classify(
    profile: MassProfile,
    s0: State1D,
    horizon: float = 100.0,
    x_ceiling: float = 1e6,
    config: Optional[IntegratorConfig] = None,
    speed_floor: float = 0.1,
) -> ConfinementClass1D:
    """Qualitative fate of the particle.

    * diverged before ``horizon`` -> finite-time blow-up;
    * ``|x|`` past ``x_ceiling``, or monotone motion whose final speed is still
      at least ``speed_floor * |xdot0|`` -> asymptotic escape;
    * otherwise the particle decelerates towards rest and the visited range is
      reported as confined.
    """
    traj = simulate(profile, s0, horizon, config)
    x = traj.states[:, 0]
    if traj.diverged:
        t_blowup = float(traj.t[-1]) + _remaining_time(profile, traj.states[-1], traj.invariants[-1, 0])
        return ConfinementClass1D(Confinement1D.UNBOUNDED_FINITE_TIME_BLOWUP, t_blowup=t_blowup)
    v = traj.states[:, 1]
    monotone = bool(np.all(np.sign(v) == np.sign(s0.xdot)))
    if np.max(np.abs(x)) > x_ceiling or (monotone and abs(v[-1]) >= speed_floor * abs(s0.xdot)):
        return ConfinementClass1D(Confinement1D.UNBOUNDED_ASYMPTOTIC)
    return ConfinementClass1D(Confinement1D.CONFINED_FINITE, reached_range=(float(x.min()), float(x.max())))


def _remaining_time(profile, state, pi):
    # Free motion in the PCT coordinate: the time left to reach infinity is the
    # rest of the escape integral divided by the conserved quasi-momentum.
    x, v = state
    try:
        tail = profile.sqrt_mass_antiderivative(math.copysign(math.inf, v)) - profile.sqrt_mass_antiderivative(x)
    except (ValueError, OverflowError, ArithmeticError):
        return 0.0
    rest = tail / pi
    return rest if math.isfinite(rest) and rest >= 0 else 0.0


def classify_rational_exact(profile: Rational1D, s0: State1D) -> ConfinementClass1D:
    """Analytic verdict for the rational mass: always a finite-time blow-up."""
    return ConfinementClass1D(Confinement1D.UNBOUNDED_FINITE_TIME_BLOWUP, t_blowup=blowup_time_rational(profile.B, s0))
