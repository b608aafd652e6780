"""Bound-state levels of the Pöschl-Teller effective potentials.

The Hamiltonian is discretised with second-order central differences on the
interior of the z-interval (the singular endpoints are excluded and act as
Dirichlet walls).  The closed-form ladders below serve as independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotBound, PreconditionError
from .numerics import eigen_tridiagonal, tridiagonal_eigenvector
from .quantum import EffectivePotential

DEFAULT_GRID_1D = 2000
DEFAULT_GRID_2D = 4000


@dataclass(frozen=True)
class SpectrumRequest:
    potential: EffectivePotential
    n_states: int = 3
    grid_points: Optional[int] = None
    force: bool = False  # solve even when the potential is not classified as bound

    def __post_init__(self):
        if self.n_states < 1:
            raise PreconditionError("n_states must be at least 1")
        if self.grid_points is not None and self.grid_points < 64:
            raise PreconditionError("grid_points must be at least 64")

    @property
    def grid(self) -> int:
        if self.grid_points is not None:
            return self.grid_points
        return DEFAULT_GRID_2D if self.potential.dimension != "1d" else DEFAULT_GRID_1D


@dataclass(frozen=True)
class Spectrum:
    levels_scaled: np.ndarray
    levels_physical: np.ndarray
    grid_points_used: int
    estimated_error: np.ndarray


def hamiltonian(potential: EffectivePotential, n: int):
    """Diagonal, off-diagonal and grid of the finite-difference Hamiltonian."""
    lo, hi = potential.domain
    h = (hi - lo) / (n + 1)
    z = lo + h * np.arange(1, n + 1)
    kin = potential.kinetic / (h * h)
    diag = 2 * kin + potential(z)
    off = np.full(n - 1, -kin)
    return diag, off, z


def _levels(potential, n, n_states):
    diag, off, _ = hamiltonian(potential, n)
    return eigen_tridiagonal(diag, off, n_states)


def solve(req: SpectrumRequest) -> Spectrum:
    """Lowest ``n_states`` levels with a Richardson error estimate.

    The estimate is ``|E(N) - E(N')| / 3`` where ``N'`` interior points give a
    spacing at least twice the fine one.
    """
    pot = req.potential
    if not (pot.quantum_class.bound or req.force):
        raise NotBound(
            f"{pot.dimension} potential is {pot.quantum_class.kind.value}: no bound states",
            pot.quantum_class,
        )
    n = req.grid
    if req.n_states > n // 2:
        raise PreconditionError("n_states too large for the grid")
    fine = _levels(pot, n, req.n_states)
    coarse = _levels(pot, (n + 1) // 2 - 1, req.n_states)
    return Spectrum(
        levels_scaled=fine,
        levels_physical=pot.to_physical(fine),
        grid_points_used=n,
        estimated_error=np.abs(fine - coarse) / 3,
    )


def eigenfunction(potential: EffectivePotential, level: float, grid_points: int):
    """Grid and unit-norm FD eigenvector belonging to ``level``."""
    diag, off, z = hamiltonian(potential, grid_points)
    return z, tridiagonal_eigenvector(diag, off, level)


def count_nodes(v: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Interior sign changes, ignoring entries below ``rel_tol * max|v|``."""
    big = v[np.abs(v) > rel_tol * np.abs(v).max()]
    return int(np.count_nonzero(np.diff(np.sign(big)) != 0))


def pt_reference_1d(lam: float, m0: float, n: int) -> float:
    """``(n + lambda)^2 / (2 m0)`` for ``lambda(lambda-1)/(2 m0 cos^2 z)`` on ``(-pi/2, pi/2)``."""
    if lam < 1:
        raise PreconditionError("lambda must be >= 1")
    if not m0 > 0:
        raise PreconditionError("m0 must be positive")
    if n < 0:
        raise PreconditionError("n must be non-negative")
    return (n + lam) ** 2 / (2 * m0)


def pt_reference_2d(lam_sin: float, lam_cos: float, n: int) -> float:
    """``(2n + lambda_sin + lambda_cos)^2`` for the two-term well on ``(0, pi/2)``."""
    if lam_sin <= 0.5:
        raise PreconditionError("lambda_sin must exceed 1/2 (regular branch)")
    if lam_cos < 1:
        raise PreconditionError("lambda_cos must be >= 1")
    if n < 0:
        raise PreconditionError("n must be non-negative")
    return (2 * n + lam_sin + lam_cos) ** 2
