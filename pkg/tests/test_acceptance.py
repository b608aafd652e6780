"""End-to-end acceptance criteria, each at its stated tolerance.

Every criterion prints a PASS/FAIL line (visible with ``-s``) and is repeated
in the "acceptance criteria" section of the pytest terminal summary.
"""

import contextlib
import math
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from pdmcorr.correspondence import Agreement, Model, full_report
from pdmcorr.dynamics1d import Confinement1D, State1D, classify, simulate
from pdmcorr.dynamics2d import State2D, simulate_polar
from pdmcorr.numerics import find_turning_points
from pdmcorr.profiles import Exponential1D, PowerLaw2D, Rational1D, Rational2D
from pdmcorr.quantum import (
    BEN_DANIEL_DUKE,
    ZHU_KROEMER,
    QuantumKind,
    builtin_schemes,
    classify_1d,
    classify_2d,
    coefficients,
    effective_potential_1d,
)
from pdmcorr.spectra import SpectrumRequest, solve


@contextlib.contextmanager
def criterion(number, title):
    detail = {}
    try:
        yield detail
    except BaseException:
        ACCEPTANCE_RESULTS[number] = (False, title, detail.get("msg", ""))
        print(f"[FAIL] criterion {number}: {title}")
        raise
    ACCEPTANCE_RESULTS[number] = (True, title, detail.get("msg", ""))
    print(f"[PASS] criterion {number}: {title} {detail.get('msg', '')}")


def relative_drift(values):
    return float(np.max(np.abs(values - values[0])) / abs(values[0]))


def random_case(family, rng):
    sign = rng.choice([-1.0, 1.0])
    if family == "Exponential1D":
        p = Exponential1D(A=float(rng.choice([-1.0, 1.0])), n=int(rng.integers(0, 2)), m0=rng.uniform(0.5, 2))
        return p, State1D(rng.uniform(-1, 1), sign * rng.uniform(0.2, 2))
    if family == "Rational1D":
        p = Rational1D(B=rng.uniform(0.5, 2), m0=rng.uniform(0.5, 2))
        return p, State1D(rng.uniform(-1, 1), sign * rng.uniform(0.2, 2))
    if family == "PowerLaw2D":
        p = PowerLaw2D(nu=rng.uniform(-4, 1), m0=rng.uniform(0.5, 2), r0=1.0)
        return p, State2D(1.0, 0.0, rng.uniform(-1, 1), sign * rng.uniform(0.2, 2))
    p = Rational2D(C=rng.uniform(0.5, 2), m0=rng.uniform(0.5, 2), r0=rng.uniform(0.5, 2))
    return p, State2D(p.r0, 0.0, rng.uniform(-1, 1), sign * rng.uniform(0.2, 2))


def test_criterion_01_conservation():
    with criterion(1, "quasi-momentum / angular momentum drift < 1e-7, 4 families x 50 draws") as d:
        rng = np.random.default_rng(20240601)
        worst = {}
        for family in ("Exponential1D", "Rational1D", "PowerLaw2D", "Rational2D"):
            worst[family] = 0.0
            for _ in range(50):
                profile, s0 = random_case(family, rng)
                if isinstance(s0, State1D):
                    # runs that blow up stop at the divergence marker
                    traj = simulate(profile, s0, 10.0)
                else:
                    # integrate the raw angular equation so K is not conserved by construction
                    traj = simulate_polar(profile, s0, 10.0, structural_k=False)
                worst[family] = max(worst[family], relative_drift(traj.invariants[:, 0]))
        d["msg"] = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
        assert all(v < 1e-7 for v in worst.values()), worst


def printed_tan_form(B, x0, v0, t):
    return math.tan(B * v0 * t + math.atan(B * x0)) / B


def test_criterion_02_closed_form_and_blowup():
    with criterion(2, "rational 1D trajectory = tan form within 1e-8; blow-up time within 1e-6") as d:
        worst = 0.0
        # the printed tan form solves the motion for starts at the origin
        for B, v0 in [(1.0, 1.0), (2.0, 0.7), (0.5, -1.5), (1.5, -0.8)]:
            t_blow = math.pi / (2 * B * abs(v0))
            traj = simulate(Rational1D(B, 1.0), State1D(0.0, v0), 0.95 * t_blow)
            exact = np.array([printed_tan_form(B, 0.0, v0, t) for t in traj.t])
            worst = max(worst, float(np.max(np.abs(traj.states[:, 0] - exact))))
        blow_err = []
        for B, v0 in [(1.0, 1.0), (2.0, 0.7), (0.5, -1.5)]:
            fate = classify(Rational1D(B, 1.0), State1D(0.0, v0))
            assert fate.kind is Confinement1D.UNBOUNDED_FINITE_TIME_BLOWUP
            blow_err.append(abs(fate.t_blowup - math.pi / (2 * B * abs(v0))))
        d["msg"] = f"max |x - tan form| {worst:.1e}, max blow-up time error {max(blow_err):.1e}"
        assert worst < 1e-8
        assert max(blow_err) < 1e-6


def test_criterion_03_force_identity():
    with criterion(3, "m(x) xddot + A m0 xdot0^2 x^n = 0 within 1e-6 relative (n=0,1; A=+-1)") as d:
        worst = 0.0
        for n in (0, 1):
            for A in (1.0, -1.0):
                for m0, v0 in [(1.0, 1.0), (2.0, -0.6), (0.5, 1.7)]:
                    profile = Exponential1D(A, n, m0)
                    traj = simulate(profile, State1D(0.0, v0), 3.0)
                    for x, v in traj.states[1:]:
                        m, dm, _ = profile.eval(x)
                        xddot = -0.5 * dm / m * v * v
                        ref = A * m0 * v0 * v0 * x**n
                        worst = max(worst, abs(m * xddot + ref) / abs(ref))
        d["msg"] = f"max relative residual {worst:.1e}"
        assert worst < 1e-6


def test_criterion_04_power_law_bound():
    with criterion(4, "nu=-3 reaches r_max = 2 +- 1e-5 and never exceeds it; nu=0 escapes past r=100") as d:
        traj = simulate_polar(PowerLaw2D(-3, 1, 1), State2D(1, 0, 1, 1), 20.0)
        turns = [r for _, r in find_turning_points(traj, 2, 0)]
        attained = max([traj.states[:, 0].max()] + turns)
        d["msg"] = f"attained {attained:.9f}"
        assert attained == pytest.approx(2.0, abs=1e-5)
        assert traj.states[:, 0].max() <= 2.0 + 1e-5
        free = simulate_polar(PowerLaw2D(0, 1, 1), State2D(1, 0, 1, 1), 100.0)
        assert free.states[:, 0].max() > 100


def test_criterion_05_spiral():
    with criterion(5, "nu=-2 orbit satisfies r = exp(theta) within 1e-6 on [0, 4 pi]") as d:
        traj = simulate_polar(PowerLaw2D(-2, 1, 1), State2D(1, 0, 1, 1), 4 * math.pi)
        r, theta = traj.states[:, 0], traj.states[:, 1]
        assert theta[-1] == pytest.approx(4 * math.pi, rel=1e-9)
        err = float(np.max(np.abs(r / np.exp(theta) - 1)))
        d["msg"] = f"max relative error {err:.1e}"
        assert err < 1e-6


def test_criterion_06_rational_interval():
    with criterion(6, "rational 2D turning radii = (sqrt2-1, sqrt2+1) within 1e-5; r0 circle within 1e-8") as d:
        traj = simulate_polar(Rational2D(1, 1, 1), State2D(1, 0, 1, 1), 20.0)
        turns = [r for _, r in find_turning_points(traj, 2, 0)]
        lo, hi = math.sqrt(2) - 1, math.sqrt(2) + 1
        inner = [r for r in turns if r < 1]
        outer = [r for r in turns if r > 1]
        assert inner and outer
        err = max(max(abs(r - lo) / lo for r in inner), max(abs(r - hi) / hi for r in outer))
        circle = simulate_polar(Rational2D(1, 1, 1), State2D(1, 0, 0, 1), 20.0)
        dev = float(np.max(np.abs(circle.states[:, 0] - 1)))
        d["msg"] = f"turning-radius error {err:.1e}, circle deviation {dev:.1e}"
        assert err < 1e-5
        assert dev < 1e-8


def test_criterion_07_coefficient_table():
    with criterion(7, "exact (a, b, xi) and 5a-4b for the five orderings"):
        table = {
            "ZhuKroemer": (F(1, 4), F(5, 16), F(3, 2), F(0)),
            "MustafaMazharimousavi": (F(0), F(0), F(7, 8), F(0)),
            "BenDanielDuke": (F(-1, 4), F(-7, 16), F(0), F(1, 2)),
            "GoraWilliams": (F(1, 4), F(9, 16), F(2), F(-1)),
            "LiKuhn": (F(0), F(1, 16), F(1), F(-1, 4)),
        }
        got = {}
        for s in builtin_schemes():
            c = coefficients(s)
            got[s.name] = (c.a, c.b, c.xi, c.well_1d)
        assert got == table


def test_criterion_08_quantum_classes():
    with criterion(8, "1D and 2D quantum classification, exact boolean match"):
        kinds = {s.name: classify_1d(s).kind for s in builtin_schemes()}
        assert kinds == {
            "ZhuKroemer": QuantumKind.FREE,
            "MustafaMazharimousavi": QuantumKind.FREE,
            "BenDanielDuke": QuantumKind.BOUND_STATES,
            "GoraWilliams": QuantumKind.UNPHYSICAL,
            "LiKuhn": QuantumKind.UNPHYSICAL,
        }
        for s in builtin_schemes():
            for m in (1, 2):
                expected = s.name != "GoraWilliams"
                assert classify_2d(s, m).bound is expected and classify_2d(s, -m).bound is expected
            for m in range(3, 11):
                assert classify_2d(s, m).bound and classify_2d(s, -m).bound


def test_criterion_09_spectral_dual_oracle():
    with criterion(9, "BDD FD levels = (n+2)^2/2 within 1e-4, Richardson bounds error, box levels (n+1)^2/2") as d:
        bdd = solve(SpectrumRequest(effective_potential_1d(BEN_DANIEL_DUKE, 1.0, 1.0), n_states=5, grid_points=4000))
        ladder = np.array([(n + 2) ** 2 / 2 for n in range(5)])
        true_err = np.abs(bdd.levels_scaled - ladder)
        assert np.all(true_err < 1e-4)
        assert np.all(bdd.estimated_error >= true_err), (bdd.estimated_error, true_err)
        free = effective_potential_1d(ZHU_KROEMER, 1.0, 1.0)
        box = solve(SpectrumRequest(free, n_states=5, grid_points=4000, force=True))
        box_err = np.abs(box.levels_scaled - np.array([(n + 1) ** 2 / 2 for n in range(5)]))
        d["msg"] = f"max BDD error {true_err.max():.1e}, max box error {box_err.max():.1e}"
        assert np.all(box_err < 1e-4)


def test_criterion_10_correspondence_headlines():
    with criterion(10, "headline correspondence judgments"):
        report = full_report(builtin_schemes())
        agg = {s.scheme.name: {m: a for m, (a, _) in s.by_model.items()} for s in report.summaries}
        both = {Model.RATIONAL_1D: Agreement.CONSISTENT, Model.RATIONAL_2D: Agreement.CONSISTENT}
        assert agg["ZhuKroemer"] == both
        assert agg["MustafaMazharimousavi"] == both
        assert agg["GoraWilliams"][Model.RATIONAL_1D] is Agreement.CONTRADICTS
        assert agg["LiKuhn"][Model.RATIONAL_1D] is Agreement.CONTRADICTS
        assert agg["BenDanielDuke"][Model.RATIONAL_1D] is Agreement.CONTRADICTS
        bdd_2d = [c for c in report.cells if c.scheme.name == "BenDanielDuke" and c.model is Model.RATIONAL_2D]
        assert bdd_2d and all(c.quantum_class.bound for c in bdd_2d)
