"""Numerical kernels: explicit ODE integration, tridiagonal eigenvalues, turning points.

Everything here is pure: the same inputs always produce bit-identical outputs,
so parameter sweeps may call these functions concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import ConvergenceFailure, NonFiniteState, PreconditionError, StepFailure

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba ships with the supported environments
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


RHS = Callable[[float, np.ndarray], np.ndarray]

COMPLETED = "completed"
DIVERGED = "diverged"


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and limits for :func:`integrate`.

    ``method`` is ``"dopri5"`` (adaptive Dormand-Prince 5(4)) or ``"rk4"``
    (classical fixed step of size ``max_step``).  A state whose max-norm exceeds
    ``ceiling`` ends the run with status ``"diverged"``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = math.inf
    max_steps: int = 2_000_000
    method: str = "dopri5"
    ceiling: float = 1e12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise PreconditionError("tolerances must be positive")
        if self.max_steps <= 0:
            raise PreconditionError("max_steps must be positive")
        if not self.max_step > 0:
            raise PreconditionError("max_step must be positive")
        if self.method not in ("dopri5", "rk4"):
            raise PreconditionError(f"unknown method {self.method!r}")
        if self.method == "rk4" and not math.isfinite(self.max_step):
            raise PreconditionError("rk4 needs a finite max_step (used as the fixed step)")
        if not self.ceiling > 0:
            raise PreconditionError("ceiling must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of an initial value problem.

    ``states[i]`` is the state at ``t[i]``; ``invariants[i]`` holds whatever
    monitored quantities the caller asked for at that sample.
    """

    t: np.ndarray
    states: np.ndarray
    invariants: np.ndarray
    status: str = COMPLETED
    names: tuple = ()
    invariant_names: tuple = ()
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def samples(self):
        return [(t, s, inv) for t, s, inv in zip(self.t, self.states, self.invariants)]

    @property
    def diverged(self) -> bool:
        return self.status == DIVERGED

    def column(self, name: str) -> np.ndarray:
        if name in self.names:
            return self.states[:, self.names.index(name)]
        return self.invariants[:, self.invariant_names.index(name)]


# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _rms(v):
    return math.sqrt(float(np.dot(v, v)) / v.size)


def _initial_step(rhs, t0, y0, f0, direction, config):
    scale = config.abs_tol + config.rel_tol * np.abs(y0)
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, config.max_step)
    f1 = np.asarray(rhs(t0 + direction * h0, y0 + direction * h0 * f0), dtype=float)
    if not np.all(np.isfinite(f1)):
        return h0
    d2 = _rms((f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, config.max_step)


def _rk4_step(rhs, t, y, h):
    k1 = np.asarray(rhs(t, y), dtype=float)
    k2 = np.asarray(rhs(t + h / 2, y + h / 2 * k1), dtype=float)
    k3 = np.asarray(rhs(t + h / 2, y + h / 2 * k2), dtype=float)
    k4 = np.asarray(rhs(t + h, y + h * k3), dtype=float)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(
    rhs: RHS,
    state0: Sequence[float],
    t_span: tuple,
    config: Optional[IntegratorConfig] = None,
    *,
    invariants: Optional[Callable[[float, np.ndarray], Sequence[float]]] = None,
    stop: Optional[Callable[[float, np.ndarray], Optional[str]]] = None,
    names: tuple = (),
    invariant_names: tuple = (),
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` over ``t_span``, sampling every accepted step.

    The run ends early with status ``"diverged"`` once ``max|y|`` exceeds
    ``config.ceiling``, or with whatever reason string ``stop(t, y)`` returns.

    Raises
    ------
    StepFailure
        The adaptive step size underflowed (stiffness or a singularity).
    NonFiniteState
        ``rhs`` returned NaN/Inf and no smaller step avoids it.
    """
    config = config or IntegratorConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 != t0:
        raise PreconditionError("t_span is degenerate")
    direction = 1.0 if t1 > t0 else -1.0
    y = np.array(state0, dtype=float)
    f = np.asarray(rhs(t0, y), dtype=float)
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(f))):
        raise NonFiniteState(f"rhs is not finite at the initial state {y}")

    ts = [t0]
    ys = [y.copy()]
    invs = [tuple(invariants(t0, y))] if invariants else [()]

    def record(t, y):
        ts.append(t)
        ys.append(y.copy())
        invs.append(tuple(invariants(t, y)) if invariants else ())

    status = COMPLETED
    t = t0
    steps = 0

    if config.method == "rk4":
        h = config.max_step
        while direction * (t1 - t) > 0:
            step = min(h, abs(t1 - t))
            # land exactly on t1 without a sliver step
            if abs(t1 - t) - step < 1e-12 * max(1.0, abs(t1)):
                step = abs(t1 - t)
            y = _rk4_step(rhs, t, y, direction * step)
            t = t1 if step == abs(t1 - t) else t + direction * step
            steps += 1
            if not np.all(np.isfinite(y)):
                raise NonFiniteState(f"non-finite state at t={t}")
            record(t, y)
            if np.max(np.abs(y)) > config.ceiling:
                status = DIVERGED
                break
            if stop is not None and (reason := stop(t, y)):
                status = reason
                break
            if steps >= config.max_steps:
                raise StepFailure("max_steps exceeded")
        return _pack(ts, ys, invs, status, names, invariant_names)

    atol, rtol = config.abs_tol, config.rel_tol
    h = _initial_step(rhs, t0, y, f, direction, config)
    rejected_last = False
    nonfinite_rejects = 0
    k = [f, None, None, None, None, None, None]
    while direction * (t1 - t) > 0:
        if steps >= config.max_steps:
            raise StepFailure(f"max_steps={config.max_steps} exceeded at t={t}")
        h = min(h, config.max_step)
        last = False
        if h >= abs(t1 - t):
            h = abs(t1 - t)
            last = True
        if h <= 16 * np.spacing(max(abs(t), 1e-300)):
            cls = NonFiniteState if nonfinite_rejects else StepFailure
            exc = cls(f"step size underflow at t={t}, y={y}")
            exc.partial = _pack(ts, ys, invs, "failed", names, invariant_names)
            raise exc
        hs = direction * h
        for s in range(1, 7):
            acc = y.copy()
            for a, ks in zip(_A[s], k):
                if a:
                    acc += (hs * a) * ks
            if s == 6:
                y_new = acc
            k[s] = np.asarray(rhs(t + _C[s] * hs, acc), dtype=float)
            if not np.all(np.isfinite(k[s])):
                break
        else:
            s = 7
        if s < 7 or not np.all(np.isfinite(y_new)):
            nonfinite_rejects += 1
            h *= 0.25
            rejected_last = True
            continue
        err_vec = hs * (
            _E[0] * k[0] + _E[2] * k[2] + _E[3] * k[3] + _E[4] * k[4] + _E[5] * k[5] + _E[6] * k[6]
        )
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(err_vec / scale)
        if err <= 1.0:
            t = t1 if last else t + hs
            y = y_new
            k[0] = k[6]
            steps += 1
            nonfinite_rejects = 0
            record(t, y)
            if np.max(np.abs(y)) > config.ceiling:
                status = DIVERGED
                break
            if stop is not None and (reason := stop(t, y)):
                status = reason
                break
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if rejected_last:
                fac = min(fac, 1.0)
            h *= fac
            rejected_last = False
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected_last = True
    return _pack(ts, ys, invs, status, names, invariant_names)


def _pack(ts, ys, invs, status, names, invariant_names):
    inv = np.array(invs, dtype=float)
    if inv.ndim == 1:
        inv = inv.reshape(len(ts), 0)
    return Trajectory(
        t=np.array(ts),
        states=np.array(ys),
        invariants=inv,
        status=status,
        names=tuple(names),
        invariant_names=tuple(invariant_names),
    )


@njit(cache=True)
def _tql1(d, e, max_iter):
    # Implicit-shift QL on a symmetric tridiagonal matrix, eigenvalues only.
    # d: diagonal (overwritten with eigenvalues); e: sub-diagonal padded to len(d).
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def eigen_tridiagonal(diag, offdiag, n_lowest: Optional[int] = None, max_iter: int = 50) -> np.ndarray:
    """Lowest ``n_lowest`` eigenvalues (ascending) of a symmetric tridiagonal matrix.

    Uses implicit-shift QL with at most ``max_iter`` sweeps per eigenvalue.
    """
    d = np.array(diag, dtype=np.float64)
    off = np.asarray(offdiag, dtype=np.float64)
    n = d.size
    if n == 0:
        raise PreconditionError("empty matrix")
    if off.size != n - 1:
        raise PreconditionError(f"offdiag must have length {n - 1}, got {off.size}")
    if n_lowest is None:
        n_lowest = n
    if not 1 <= n_lowest <= n:
        raise PreconditionError(f"n_lowest must be in [1, {n}]")
    e = np.zeros(n)
    e[: n - 1] = off
    failed = _tql1(d, e, max_iter)
    if failed >= 0:
        raise ConvergenceFailure(f"QL did not converge for eigenvalue {failed} in {max_iter} iterations")
    return np.sort(d)[:n_lowest]


def tridiagonal_eigenvector(diag, offdiag, value: float, sweeps: int = 3) -> np.ndarray:
    """Unit eigenvector for an (already converged) eigenvalue by inverse iteration."""
    d = np.asarray(diag, dtype=float)
    off = np.asarray(offdiag, dtype=float)
    n = d.size
    shift = value + 1e-10 * max(1.0, abs(value))
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = d - shift
    ab[2, :-1] = off
    v = np.cos(np.linspace(0.1, 1.3, n)) + 1e-3 * np.arange(n) / n
    for _ in range(sweeps):
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    if v[np.argmax(np.abs(v) > 1e-8 * np.abs(v).max())] < 0:
        v = -v
    return v


def find_turning_points(traj: Trajectory, component: int, position: Optional[int] = None):
    """Times and positions where a velocity component changes sign.

    The crossing time comes from a 3-point quadratic fit of the velocity.  The
    returned value is the matching ``position`` component (by default the one
    paired with ``component`` in a ``[positions..., velocities...]`` layout),
    read off a cubic Hermite interpolant that uses the velocity samples.
    """
    n = len(traj.t)
    if n < 3:
        raise PreconditionError("need at least 3 samples")
    if position is None:
        position = component - traj.states.shape[1] // 2
    t = traj.t
    v = traj.states[:, component]
    x = traj.states[:, position]
    out = []
    for i in range(n - 1):
        if v[i] == 0.0 and 0 < i:
            if np.sign(v[i - 1]) != np.sign(v[i + 1]) and v[i - 1] != 0:
                out.append((float(t[i]), float(x[i])))
            continue
        if v[i] * v[i + 1] >= 0:
            continue
        lo = max(0, min(i - 1, n - 3))
        tt, vv = t[lo : lo + 3], v[lo : lo + 3]
        coeffs = np.polyfit(tt - t[i], vv, 2)
        roots = np.roots(coeffs) if abs(coeffs[0]) > 0 else np.roots(coeffs[1:])
        h = t[i + 1] - t[i]
        real = [r.real for r in np.atleast_1d(roots) if abs(r.imag) < 1e-14 * max(1.0, abs(h))]
        inside = [r for r in real if -1e-12 * h <= r <= h * (1 + 1e-12)]
        if inside:
            tau = min(inside, key=lambda r: abs(r - h / 2))
        else:
            tau = h * v[i] / (v[i] - v[i + 1])
        out.append((float(t[i] + tau), float(_hermite(x[i], x[i + 1], v[i], v[i + 1], h, tau))))
    return out


def _hermite(x0, x1, v0, v1, h, tau):
    s = tau / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1
