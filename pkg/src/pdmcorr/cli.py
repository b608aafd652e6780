"""Command-line entry point: ``pdmcorr <subcommand> [options]``.

Every option can also come from a ``key = value`` file given with
``--config``; command-line flags win over file values.  Exit status is 0 on
success, 2 on configuration or precondition errors and 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import os
import re
import sys
from typing import Optional, Sequence

import numpy as np

from . import correspondence, dynamics1d, dynamics2d, quantum, spectra
from .errors import NotBound, NumericalError, PreconditionError
from .numerics import IntegratorConfig, find_turning_points
from .profiles import BUILTIN_FAMILIES, MassProfile, PowerLaw2D, Rational1D, Rational2D, from_config

log = logging.getLogger("pdmcorr")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

PROFILE_KEYS = ("family", "A", "n", "B", "C", "nu", "m0", "r0")


class ConfigError(PreconditionError):
    pass


def _fmt(v) -> str:
    return format(float(v), ".17g")


class Settings:
    """Flag values layered over an optional key-value config file."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._file = {}
        path = self._args.get("config")
        if path:
            parser = configparser.ConfigParser(interpolation=None)
            parser.optionxform = str
            try:
                with open(path, encoding="utf-8") as fh:
                    parser.read_string("[run]\n" + fh.read())
            except OSError as exc:
                raise ConfigError(f"cannot read config file {path}: {exc}") from None
            except configparser.Error as exc:
                raise ConfigError(f"malformed config file {path}: {exc}") from None
            self._file = {k.replace("-", "_"): v for k, v in parser["run"].items()}

    def get(self, key: str, kind=str, default=None):
        value = self._args.get(key)
        if value is None:
            value = self._file.get(key)
        if value is None:
            return default
        try:
            return kind(value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None

    def require(self, key: str, kind=str):
        value = self.get(key, kind)
        if value is None:
            raise ConfigError(f"missing required setting {key}")
        return value


def _profile(st: Settings) -> MassProfile:
    block = {k: st.get(k) for k in PROFILE_KEYS if st.get(k) is not None}
    return from_config(block)


def _integrator(st: Settings) -> IntegratorConfig:
    return IntegratorConfig(
        abs_tol=st.get("abs_tol", float, 1e-10),
        rel_tol=st.get("rel_tol", float, 1e-10),
        max_step=st.get("max_step", float, math.inf),
        max_steps=st.get("max_steps", int, 2_000_000),
        method=st.get("method", str, "dopri5"),
    )


def _open_output(path: str):
    if path == "-":
        return sys.stdout
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def _write_rows(path: str, fmt: str, header: Sequence[str], rows) -> None:
    fh = _open_output(path)
    try:
        if fmt == "json":
            records = [dict(zip(header, (float(v) for v in row))) for row in rows]
            json.dump(records, fh, indent=1)
            fh.write("\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _output(st: Settings, default: str):
    fmt = st.get("format", str, "csv").lower()
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    path = st.get("output", str, f"{default}.{fmt}")
    return path, fmt


def _relative_drift(values) -> float:
    ref = values[0]
    scale = abs(ref) if ref != 0 else 1.0
    return float(np.max(np.abs(values - ref)) / scale)


def cmd_simulate1d(st: Settings) -> int:
    profile = _profile(st)
    if profile.dimension != 1:
        raise ConfigError(f"{profile.family} is a radial profile; use simulate2d")
    s0 = dynamics1d.State1D(st.get("x0", float, 0.0), st.require("v0", float))
    t_end = st.require("t_end", float)
    config = _integrator(st)
    traj = dynamics1d.simulate(profile, s0, t_end, config)
    path, fmt = _output(st, "trajectory1d")
    rows = np.column_stack([traj.t, traj.states, traj.invariants[:, 1], traj.invariants[:, 0]])
    _write_rows(path, fmt, ("t", "x", "xdot", "mass", "Pi"), rows)

    if isinstance(profile, Rational1D):
        fate = dynamics1d.classify_rational_exact(profile, s0)
    else:
        fate = dynamics1d.classify(profile, s0, st.get("horizon", float, 100.0), st.get("x_ceiling", float, 1e6), config)
    x, v = traj.states[-1]
    print(f"status={traj.status} t={_fmt(traj.t[-1])} x={_fmt(x)} xdot={_fmt(v)}")
    print(f"Pi drift (relative) = {_relative_drift(traj.invariants[:, 0]):.3e}")
    print(f"class: {fate}")
    if fate.t_blowup is not None:
        print(f"blow-up at t = {fate.t_blowup:.10g}")
    return EXIT_OK


def _analytic_bound(profile, s0: dynamics2d.State2D):
    g_start = profile(s0.r)
    if isinstance(profile, PowerLaw2D):
        # the power law is self-similar, so the bound is taken about the start radius
        return dynamics2d.power_law_bound(profile.nu, g_start, s0.r, s0.rdot, s0.thetadot)
    if isinstance(profile, Rational2D):
        K = g_start * s0.r**2 * s0.thetadot
        a2 = g_start * s0.rdot**2 + K * K / (g_start * s0.r**2)
        return dynamics2d.rational_interval_from_invariants(profile.C, profile.C_tilde, a2, K)
    return None


def cmd_simulate2d(st: Settings) -> int:
    profile = _profile(st)
    if profile.dimension != 2:
        raise ConfigError(f"{profile.family} is a line profile; use simulate1d")
    r_start = st.get("r_start", float, None)
    if r_start is None:
        r_start = getattr(profile, "r0", 1.0)
    s0 = dynamics2d.State2D(r_start, st.get("theta0", float, 0.0), st.get("rdot0", float, 0.0), st.get("thetadot0", float, 0.0))
    if s0.rdot == 0 and s0.thetadot == 0:
        raise ConfigError("particle at rest: give a non-zero rdot0 or thetadot0")
    traj = dynamics2d.simulate_polar(profile, s0, st.require("t_end", float), _integrator(st),
                                     structural_k=not st.get("raw_angular", _as_bool, False))
    path, fmt = _output(st, "trajectory2d")
    rows = np.column_stack([traj.t, traj.states, traj.invariants])
    _write_rows(path, fmt, ("t", "r", "theta", "rdot", "thetadot", "K", "eq40_residual"), rows)

    r = traj.states[:, 0]
    K = traj.invariants[:, 0]
    print(f"status={traj.status} t={_fmt(traj.t[-1])} r={_fmt(r[-1])} theta={_fmt(traj.states[-1, 1])}")
    print(f"K drift (relative) = {_relative_drift(K):.3e}")
    turns = [p for _, p in find_turning_points(traj, 2, 0)]
    r_lo = min([float(r.min())] + turns)
    r_hi = max([float(r.max())] + turns)
    bound = _analytic_bound(profile, s0)
    if bound is None:
        print(f"simulated radial range [{r_lo:.10g}, {r_hi:.10g}]")
    elif bound.kind is dynamics2d.BoundKind.SPIRAL:
        dtheta = traj.states[-1, 1] - s0.theta
        rate = math.log(r[-1] / s0.r) / dtheta if dtheta else math.nan
        print(f"analytic {bound}; simulated rate {rate:.10g}")
    elif bound.kind is dynamics2d.BoundKind.MAX_RADIUS:
        print(f"analytic r_max {bound.r_hi:.10g} vs simulated max {r_hi:.10g}")
    elif bound.kind is dynamics2d.BoundKind.INTERVAL:
        print(f"analytic interval ({bound.r_lo:.6f}, {bound.r_hi:.6f}) vs simulated [{r_lo:.10g}, {r_hi:.10g}]")
    else:
        print(f"analytic {bound}; simulated max {r_hi:.10g}")
    return EXIT_OK


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(value)


def _scheme(st: Settings, name: str) -> quantum.OrderingScheme:
    if name.lower() == "custom":
        return quantum.OrderingScheme.from_jk("custom", st.require("j"), st.require("k"), st.get("l"))
    return quantum.scheme_by_name(name)


def cmd_spectrum(st: Settings) -> int:
    scheme = _scheme(st, st.require("scheme"))
    model = correspondence.parse_model(st.get("model", str, "rational1d"))
    m0 = st.get("m0", float, 1.0)
    if model is correspondence.Model.RATIONAL_1D:
        pot = quantum.effective_potential_1d(scheme, st.get("B", float, 1.0), m0)
    else:
        m_quantum = st.get("m", int)
        if m_quantum is None:
            raise ConfigError("the rational2d model needs --m")
        pot = quantum.effective_potential_2d(scheme, m_quantum, st.get("C", float, 1.0), m0, st.get("r0", float, 1.0))
    req = spectra.SpectrumRequest(pot, st.get("n", int, 3), st.get("grid", int), st.get("force", _as_bool, False))
    try:
        result = spectra.solve(req)
    except NotBound as exc:
        print(f"NotBound: {scheme.name} {model.value}: class={exc.quantum_class.kind.value}")
        return EXIT_OK
    path, fmt = _output(st, "spectrum")
    rows = [(i, a, b, e) for i, (a, b, e) in
            enumerate(zip(result.levels_scaled, result.levels_physical, result.estimated_error))]
    _write_rows(path, fmt, ("n", "level_scaled", "level_physical", "estimated_error"), rows)
    print(f"{scheme.name} {model.value}: class={pot.quantum_class} grid={result.grid_points_used}")
    for i, a, b, e in rows:
        print(f"  n={i}  level={a:.10g}  E={b:.10g}  err~{e:.2e}")
    return EXIT_OK


def _m_range(text: str):
    text = text.strip()
    span = re.fullmatch(r"(\d+)\s*-\s*(\d+)", text)
    if span:
        return tuple(range(int(span[1]), int(span[2]) + 1))
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"bad m range {text!r}; use e.g. 1,2,3 or 1-3") from None


def scheme_record(s: quantum.OrderingScheme, m_range) -> dict:
    c = quantum.coefficients(s)
    ex = quantum.format_exact
    return {
        "scheme": s.name,
        "j": ex(s.j),
        "k": ex(s.k),
        "l": ex(s.l),
        "a": ex(c.a),
        "b": ex(c.b),
        "xi": ex(c.xi),
        "coeff_1d": ex(c.well_1d),
        "class_1d": str(quantum.classify_1d(s)),
        "class_2d_by_m": {str(m): str(quantum.classify_2d(s, m)) for m in m_range},
    }


def cmd_classify(st: Settings) -> int:
    names = [n.strip() for n in st.get("schemes", str, "all").split(",") if n.strip()]
    if names == ["all"]:
        schemes = quantum.builtin_schemes()
    else:
        schemes = [_scheme(st, n) for n in names]
    models = [correspondence.parse_model(m) for m in st.get("models", str, "rational1d,rational2d").split(",") if m.strip()]
    m_range = _m_range(st.get("m_range", str, "1,2,3"))
    report = correspondence.full_report(schemes, models, m_range)

    doc = {
        "schemes": [scheme_record(s, m_range) for s in schemes],
        "verdicts": [
            {
                "scheme": v.scheme.name,
                "model": v.model.value,
                "m": v.m_quantum,
                "classical": str(v.classical_class),
                "quantum": str(v.quantum_class),
                "agreement": v.agreement.value,
            }
            for v in report.cells
        ],
        "summary": [
            {
                "scheme": s.scheme.name,
                **{m.value: (a.value + (f" ({d})" if d else "")) for m, (a, d) in s.by_model.items()},
                "headline": s.headline,
            }
            for s in report.summaries
        ],
        "notes": list(report.notes) + [quantum.WALL_NOTE],
    }
    path = st.get("output", str, "classify.json")
    fh = _open_output(path)
    try:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    finally:
        if fh is not sys.stdout:
            fh.close()

    print(f"{'scheme':<24}{'a':>8}{'b':>8}{'xi':>8}{'5a-4b':>8}  {'1D':<14}" + "".join(f"{'m=' + str(m):<14}" for m in m_range))
    for s in schemes:
        c = quantum.coefficients(s)
        cells = f"{str(c.a):>8}{str(c.b):>8}{str(c.xi):>8}{str(c.well_1d):>8}"
        q1 = quantum.classify_1d(s).kind.value
        q2 = "".join(f"{quantum.classify_2d(s, m).kind.value:<14}" for m in m_range)
        print(f"{s.name:<24}{cells}  {q1:<14}{q2}")
    print()
    for s in report.summaries:
        parts = ", ".join(f"{m.value}: {a.value}" + (f" ({d})" if d else "") for m, (a, d) in s.by_model.items())
        print(f"{s.scheme.name:<24}{parts}; {s.headline}")
    for note in report.notes:
        print(f"note: {note}")
    return EXIT_OK


def cmd_profiles(st: Settings) -> int:
    params = {
        "exponential1d": "A (non-zero), n (>= 0), m0",
        "rational1d": "B (non-zero), m0",
        "powerlaw2d": "nu, m0, r0",
        "rational2d": "C (non-zero), m0, r0",
    }
    for name in BUILTIN_FAMILIES:
        print(f"{name:<15}{params[name]}")
    print(f"{'constant':<15}m0 (constant1d / constant2d select the dimension)")
    return EXIT_OK


def _add_profile_flags(p):
    p.add_argument("--family")
    for key in ("A", "B", "C", "nu", "m0", "r0"):
        p.add_argument(f"--{key}", type=float)
    p.add_argument("--n", type=int, help="exponent of the exponential family")


def _add_integrator_flags(p):
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--abs-tol", dest="abs_tol", type=float)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--max-step", dest="max_step", type=float)
    p.add_argument("--max-steps", dest="max_steps", type=int)
    p.add_argument("--method", choices=("dopri5", "rk4"))


def _add_output_flags(p):
    p.add_argument("--output", "-o", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdmcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key = value settings file (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate1d", help="integrate the motion on a line")
    _add_profile_flags(p)
    _add_integrator_flags(p)
    _add_output_flags(p)
    p.add_argument("--x0", type=float)
    p.add_argument("--v0", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--x-ceiling", dest="x_ceiling", type=float)
    p.set_defaults(func=cmd_simulate1d)

    p = sub.add_parser("simulate2d", help="integrate the planar motion in polar coordinates")
    _add_profile_flags(p)
    _add_integrator_flags(p)
    _add_output_flags(p)
    p.add_argument("--r-start", dest="r_start", type=float, help="initial radius (default r0)")
    p.add_argument("--theta0", type=float)
    p.add_argument("--rdot0", type=float)
    p.add_argument("--thetadot0", type=float)
    p.add_argument("--raw-angular", dest="raw_angular", action="store_const", const=True,
                   help="integrate the angular equation instead of using K/(g r^2)")
    p.set_defaults(func=cmd_simulate2d)

    p = sub.add_parser("spectrum", help="bound-state levels of an ordering's effective potential")
    p.add_argument("--scheme")
    p.add_argument("--j")
    p.add_argument("--k")
    p.add_argument("--l")
    p.add_argument("--model", choices=("rational1d", "rational2d"))
    p.add_argument("--n", type=int, help="number of levels")
    p.add_argument("--m", type=int, help="magnetic quantum number (2D)")
    for key in ("B", "C", "m0", "r0"):
        p.add_argument(f"--{key}", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--force", action="store_const", const=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("classify", help="ordering coefficients and correspondence verdicts")
    p.add_argument("--schemes", help="comma list of names, 'all', or 'custom'")
    p.add_argument("--j")
    p.add_argument("--k")
    p.add_argument("--l")
    p.add_argument("--models")
    p.add_argument("--m-range", dest="m_range")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("profiles", help="list built-in mass profiles")
    p.set_defaults(func=cmd_profiles)
    return parser


def _setup_logging():
    level = os.environ.get("PDM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s",
                        force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    log.debug("command %s", args.command)
    try:
        return args.func(Settings(args))
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
