"""Quasi-free particle in the plane with a mass that depends on the polar radius.

For ``m(r, theta) = g(r)`` the angular momentum ``K = g(r) r^2 thetadot`` is
conserved and the radial motion follows

    rddot = -(g'/2g) rdot^2 + (1 + r g'/2g) r thetadot^2.

An optional angular factor ``f(theta)`` (mass ``g(r) f(theta)``) is supported by
:func:`polar_rhs`; the analytic bounds in this module all assume ``f = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import CollapseToCenter, NoRealRoots, PreconditionError, StepFailure
from .numerics import IntegratorConfig, Trajectory, integrate
from .profiles import MassProfile

COLLAPSED = "collapsed"

# A trial stage that crosses r = 0 is handed back as non-finite so the
# integrator shrinks the step instead of leaving the domain.
_REJECT = np.full(4, np.nan)

# (f, f') of theta
AngularFactor = Callable[[float], tuple]


@dataclass(frozen=True)
class State2D:
    r: float
    theta: float
    rdot: float
    thetadot: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.r, self.theta, self.rdot, self.thetadot)):
            raise PreconditionError("state must be finite")
        if not self.r > 0:
            raise PreconditionError(f"r must be positive, got {self.r}")


class BoundKind(enum.Enum):
    MAX_RADIUS = "MaxRadius"
    INTERVAL = "Interval"
    UNBOUNDED = "Unbounded"
    SPIRAL = "Spiral"


@dataclass(frozen=True)
class RadialBound:
    kind: BoundKind
    r_lo: Optional[float] = None
    r_hi: Optional[float] = None
    rate: Optional[float] = None  # spiral growth rate d(ln r)/d(theta)

    @property
    def r_max(self):
        return self.r_hi

    @property
    def confined(self) -> bool:
        return self.kind in (BoundKind.MAX_RADIUS, BoundKind.INTERVAL)

    def __str__(self):
        if self.kind is BoundKind.MAX_RADIUS:
            return f"MaxRadius(r_max={self.r_hi:.10g})"
        if self.kind is BoundKind.INTERVAL:
            return f"Interval({self.r_lo:.10g}, {self.r_hi:.10g})"
        if self.kind is BoundKind.SPIRAL:
            return f"Spiral(rate={self.rate:.10g})"
        if self.r_lo is not None:
            return f"Unbounded(r >= {self.r_lo:.10g})"
        return "Unbounded"


def angular_momentum(g: MassProfile, s: State2D) -> float:
    return g(s.r) * s.r**2 * s.thetadot


def polar_rhs(g: MassProfile, s: State2D, angular: Optional[AngularFactor] = None):
    """Time derivatives ``(rdot, thetadot, rddot, thetaddot)`` from the Euler-Lagrange equations."""
    r, rd, td = s.r, s.rdot, s.thetadot
    mass, dg, _ = g.eval(r)
    lg = dg / mass
    lf = 0.0
    if angular is not None:
        f, df = angular(s.theta)
        lf = df / f
    rdd = -0.5 * lg * rd * rd + (1 + 0.5 * lg * r) * r * td * td - lf * rd * td
    tdd = 0.5 * lf * (rd * rd / (r * r) - td * td) - td * rd * (lg + 2 / r)
    return rd, td, rdd, tdd


def radial_speed_sq(g: MassProfile, r: float, init: State2D) -> float:
    """``rdot^2`` at radius ``r`` implied by energy and angular-momentum conservation.

    Uses the exact antiderivative ``-K^2/(g r^2)`` of the radial integrand, so it
    is closed form for every profile.  A negative value marks a forbidden radius.
    """
    g0 = g(init.r)
    K = g0 * init.r**2 * init.thetadot
    gr = g(r)
    total = g0 * init.rdot**2 + K * K / (g0 * init.r**2)
    return (total - K * K / (gr * r * r)) / gr


def simulate_polar(
    g: MassProfile,
    s0: State2D,
    t_end: float,
    config: Optional[IntegratorConfig] = None,
    *,
    structural_k: bool = True,
    angular: Optional[AngularFactor] = None,
    collapse_ratio: float = 1e-9,
) -> Trajectory:
    """Integrate the planar motion and sample ``(r, theta, rdot, thetadot)``.

    With ``structural_k`` (default) ``thetadot`` is always ``K / (g r^2)`` so the
    angular momentum is conserved by construction; otherwise the raw angular
    equation is integrated.  Invariants per sample are ``K`` and the residual
    ``g rdot^2 - g(r) radial_speed_sq(r)``.  The run stops with status
    ``"collapsed"`` once ``r < collapse_ratio * r0``.
    """
    if angular is not None:
        structural_k = False
    g0 = g(s0.r)
    K0 = g0 * s0.r**2 * s0.thetadot
    total = g0 * s0.rdot**2 + K0 * K0 / (g0 * s0.r**2)
    r_stop = collapse_ratio * s0.r

    def residual(r, rd, mass):
        if angular is not None:
            return math.nan
        return mass * rd * rd - (total - K0 * K0 / (mass * r * r))

    def stop(t, y):
        return COLLAPSED if y[0] < r_stop else None

    if structural_k:

        def rhs(t, y):
            r, _, rd = y
            if not r > 0:
                return _REJECT[:3]
            mass, dg, _ = g.eval(r)
            td = K0 / (mass * r * r)
            lg = dg / mass
            return np.array([rd, td, -0.5 * lg * rd * rd + (1 + 0.5 * lg * r) * r * td * td])

        def monitor(t, y):
            mass = g(y[0])
            return (K0, residual(y[0], y[2], mass))

        y0 = (s0.r, s0.theta, s0.rdot)
    else:

        def rhs(t, y):
            if not y[0] > 0:
                return _REJECT
            return np.array(polar_rhs(g, State2D(*y), angular))

        def monitor(t, y):
            mass = g(y[0])
            f = angular(y[1])[0] if angular is not None else 1.0
            return (mass * f * y[0] ** 2 * y[3], residual(y[0], y[2], mass))

        y0 = (s0.r, s0.theta, s0.rdot, s0.thetadot)

    try:
        traj = integrate(rhs, y0, (0.0, t_end), config, invariants=monitor, stop=stop,
                         invariant_names=("K", "eq40_residual"))
    except StepFailure as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None and partial.states[-1, 0] < 1e-3 * s0.r:
            raise CollapseToCenter(f"integration failed approaching r=0: {exc}") from exc
        raise

    states = traj.states
    if structural_k:
        r = states[:, 0]
        masses = np.array([g(v) for v in r])
        states = np.column_stack([states, K0 / (masses * r * r)])
    return Trajectory(
        t=traj.t,
        states=states,
        invariants=traj.invariants,
        status=traj.status,
        names=("r", "theta", "rdot", "thetadot"),
        invariant_names=("K", "eq40_residual"),
        meta={"K0": K0, "radial_energy": total},
    )


def power_law_bound(nu: float, m0: float, r0: float, rdot0: float, thetadot0: float) -> RadialBound:
    """Analytic radial fate for ``g = m0 (r/r0)^nu`` started at ``r0``."""
    if not r0 > 0:
        raise PreconditionError("r0 must be positive")
    if rdot0 == 0 and thetadot0 == 0:
        raise PreconditionError("particle at rest: give a non-zero rdot0 or thetadot0")
    K = m0 * r0**2 * thetadot0
    if nu == -2:
        if K == 0:
            return RadialBound(BoundKind.UNBOUNDED)
        return RadialBound(BoundKind.SPIRAL, rate=m0 * r0 * rdot0 / K)
    k2 = K * K / (r0 * r0)
    b2 = m0 * m0 * rdot0 * rdot0 + k2
    if k2 == 0:
        return RadialBound(BoundKind.UNBOUNDED)
    edge = r0 * (k2 / b2) ** (1.0 / (nu + 2))
    if nu < -2:
        return RadialBound(BoundKind.MAX_RADIUS, r_hi=edge)
    return RadialBound(BoundKind.UNBOUNDED, r_lo=edge)


def spiral_radius(m0: float, r0: float, rdot0: float, K: float, theta: float) -> float:
    """Exact ``r(theta) = r0 exp(m0 r0 rdot0 theta / K)`` for ``nu = -2``."""
    if K == 0:
        raise PreconditionError("spiral needs non-zero angular momentum")
    return r0 * math.exp(m0 * r0 * rdot0 / K * theta)


def rational_interval_from_invariants(C: float, C_tilde: float, a2: float, K: float) -> RadialBound:
    """Roots of ``C^2 r^2 - L r + 1 <= 0`` with ``L = sqrt(a2 C_tilde) / |K|``."""
    if K == 0:
        raise PreconditionError("radial-only motion (K = 0) has no centrifugal barrier")
    L = math.sqrt(a2 * C_tilde) / abs(K)
    c2 = C * C
    disc = 1 - 4 * c2 / (L * L)
    if disc < 0:
        if disc > -1e-14:
            disc = 0.0
        else:
            raise NoRealRoots(f"C^2 r^2 - {L:.6g} r + 1 has no real roots")
    r_hi = L / (2 * c2) * (1 + math.sqrt(disc))
    # product of the roots is 1/C^2
    r_lo = 1 / (c2 * r_hi)
    return RadialBound(BoundKind.INTERVAL, r_lo=r_lo, r_hi=r_hi)


def rational_confinement_interval(C: float, m0: float, r0: float, rdot0: float, thetadot0: float) -> RadialBound:
    """Radial interval visited by the rational-mass particle started at ``r0``."""
    if not r0 > 0:
        raise PreconditionError("r0 must be positive")
    C_tilde = m0 * (1 + C * C * r0 * r0) ** 2
    K = m0 * r0 * r0 * thetadot0
    a2 = m0 * rdot0 * rdot0 + K * K / (m0 * r0 * r0)
    return rational_interval_from_invariants(C, C_tilde, a2, K)
