import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdmcorr.errors import DomainError, PreconditionError
from pdmcorr.profiles import (
    Constant,
    Custom,
    Exponential1D,
    ForceClass,
    PowerLaw2D,
    Rational1D,
    Rational2D,
    force_sign_class,
    from_config,
)

nonzero = st.floats(0.2, 2.0).flatmap(lambda v: st.sampled_from([v, -v]))
mass = st.floats(0.2, 3.0)


def fd_check(profile, x, h=1e-5):
    m, dm, d2m = profile.eval(x)
    fd1 = (profile(x + h) - profile(x - h)) / (2 * h)
    fd2 = (profile.eval(x + h)[1] - profile.eval(x - h)[1]) / (2 * h)
    scale1 = max(abs(dm), m)
    scale2 = max(abs(d2m), m)
    assert abs(fd1 - dm) <= 1e-6 * scale1
    assert abs(fd2 - d2m) <= 1e-6 * scale2


@given(nonzero, st.integers(0, 3), mass, st.floats(-1.2, 1.2))
def test_exponential_derivatives(A, n, m0, x):
    fd_check(Exponential1D(A, n, m0), x)


@given(nonzero, mass, st.floats(-3, 3))
def test_rational1d_derivatives(B, m0, x):
    fd_check(Rational1D(B, m0), x)


@given(st.floats(-4, 2), mass, st.floats(0.3, 3), st.floats(0.2, 4))
def test_powerlaw_derivatives(nu, m0, r0, r):
    fd_check(PowerLaw2D(nu, m0, r0), r)


@given(nonzero, mass, st.floats(0, 2), st.floats(0.01, 4))
def test_rational2d_derivatives(C, m0, r0, r):
    fd_check(Rational2D(C, m0, r0), r)


def test_eval_examples():
    assert Exponential1D(1, 0, 1).eval(0.0) == (1.0, 2.0, 4.0)
    assert Rational1D(1, 1).eval(0.0) == (1.0, 0.0, -4.0)


def test_constructor_rejections():
    for bad in (lambda: Exponential1D(0.0), lambda: Exponential1D(1, -1), lambda: Exponential1D(1, 0, 0),
                lambda: Rational1D(0, 1), lambda: Rational1D(1, -1), lambda: PowerLaw2D(1, 1, 0),
                lambda: Rational2D(0, 1, 1), lambda: Rational2D(1, 1, -1)):
        with pytest.raises(PreconditionError):
            bad()


def test_powerlaw_domain():
    with pytest.raises(DomainError):
        PowerLaw2D(-3, 1, 1).eval(0.0)
    with pytest.raises(DomainError):
        PowerLaw2D(2, 1, 1).eval(-1.0)


def test_log_derivative_examples():
    assert Exponential1D(2, 1).log_derivative(3.0) == 12.0
    assert Rational1D(1.3, 2).log_derivative(0.0) == 0.0
    assert Rational2D(1, 1, 1).log_derivative(1.0) == pytest.approx(-2.0, abs=1e-15)


@given(nonzero, st.integers(0, 4), st.floats(-2, 2))
def test_exponential_log_derivative_identity(A, n, x):
    assert Exponential1D(A, n).log_derivative(x) == pytest.approx(2 * A * x**n, rel=1e-15, abs=1e-300)


@given(nonzero, mass, st.floats(0, 3))
def test_rational2d_reference_mass(C, m0, r0):
    p = Rational2D(C, m0, r0)
    assert p(r0) == pytest.approx(m0, rel=4e-16)
    assert p.C_tilde == pytest.approx(m0 * (1 + C * C * r0 * r0) ** 2)


def test_force_sign_class():
    assert force_sign_class(Exponential1D(1, 0), 0.0, 1.0) is ForceClass.DAMPING
    assert force_sign_class(Constant(2.0), 5.0, 1.0) is ForceClass.NEUTRAL
    assert force_sign_class(Rational1D(1, 1), 1.0, 1.0) is ForceClass.ANTI_DAMPING
    assert force_sign_class(Exponential1D(1, 0), 0.0, -1.0) is ForceClass.ANTI_DAMPING


@pytest.mark.parametrize(
    "profile, x",
    [(Exponential1D(0.7, 0, 1.5), 1.3), (Exponential1D(-0.8, 1, 1.0), -0.9), (Exponential1D(0.6, 1, 2.0), 1.1),
     (Exponential1D(0.5, 2, 1.0), 0.8), (Rational1D(1.4, 2.0), -2.0), (PowerLaw2D(-3, 1, 1), 2.5),
     (PowerLaw2D(-2, 2, 0.5), 1.5), (PowerLaw2D(0.5, 1, 1), 2.0), (Rational2D(1.2, 1.0, 0.5), 3.0)],
)
def test_sqrt_mass_antiderivative(profile, x):
    from scipy.integrate import quad

    lo = 1.0 if isinstance(profile, PowerLaw2D) else 0.0
    ref, _ = quad(lambda s: math.sqrt(profile(s)), lo, x, epsabs=1e-13, epsrel=1e-13)
    got = profile.sqrt_mass_antiderivative(x) - profile.sqrt_mass_antiderivative(lo)
    assert got == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_custom_and_constant():
    p = Custom(lambda x: 1 + x * x, lambda x: 2 * x, lambda x: 2.0)
    assert p.eval(2.0) == (5.0, 4.0, 2.0)
    with pytest.raises(DomainError):
        Custom(lambda x: -1.0, lambda x: 0.0, lambda x: 0.0).eval(0.0)
    c = Constant(4.0)
    assert c.eval(3.0) == (4.0, 0.0, 0.0)
    assert c.sqrt_mass_antiderivative(3.0) == 6.0


def test_from_config():
    assert from_config({"family": "rational1d", "B": "1.5", "m0": "2"}) == Rational1D(1.5, 2.0)
    assert from_config({"family": "Exponential1D", "A": -1, "n": 1}) == Exponential1D(-1.0, 1, 1.0)
    assert from_config({"family": "powerlaw2d", "nu": -3}) == PowerLaw2D(-3.0, 1.0, 1.0)
    assert from_config({"family": "rational2d", "C": 1, "r0": 0}) == Rational2D(1.0, 1.0, 0.0)
    assert from_config({"family": "constant2d", "m0": 3}).dimension == 2
    with pytest.raises(PreconditionError):
        from_config({"family": "rational1d"})
    with pytest.raises(PreconditionError):
        from_config({"family": "gaussian"})
