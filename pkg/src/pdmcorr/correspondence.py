"""Classical confinement versus quantum spectral class, per ordering scheme.

Rule: a classically confined particle should have bound states, and an
unconfined one should be quantum mechanically free.  The classical side for
the two benchmark models is analytic (finite-time blow-up for the rational 1D
mass, a closed radial interval for the rational 2D mass).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .dynamics1d import ConfinementClass1D, State1D, classify_rational_exact
from .dynamics2d import RadialBound, rational_confinement_interval
from .errors import PreconditionError
from .profiles import Rational1D
from .quantum import OrderingScheme, QuantumClass, QuantumKind, classify_1d, classify_2d


class Model(enum.Enum):
    RATIONAL_1D = "Rational1D"
    RATIONAL_2D = "Rational2D"


class Agreement(enum.Enum):
    CONSISTENT = "Consistent"
    CONTRADICTS = "Contradicts"
    CONDITIONALLY_CONSISTENT = "ConditionallyConsistent"


# Benchmark initial data; the verdicts do not depend on these values.
BENCHMARK_1D = dict(B=1.0, m0=1.0, x0=0.0, v0=1.0)
BENCHMARK_2D = dict(C=1.0, m0=1.0, r0=1.0, rdot0=1.0, thetadot0=1.0)

EXTENSION_NOTE = (
    "rule table extended symmetrically: a confined classical particle whose quantum "
    "counterpart is free, unphysical or not bound is counted as a contradiction"
)


@dataclass(frozen=True)
class CorrespondenceVerdict:
    scheme: OrderingScheme
    model: Model
    classical_class: Union[ConfinementClass1D, RadialBound]
    quantum_class: QuantumClass
    agreement: Agreement
    m_quantum: Optional[int] = None
    detail: str = ""


def parse_model(model) -> Model:
    if isinstance(model, Model):
        return model
    key = str(model).lower().replace("_", "").replace("-", "")
    for m in Model:
        if m.value.lower() == key:
            return m
    raise PreconditionError(f"unknown model {model!r}; choose rational1d or rational2d")


def classical_verdict(model: Model):
    if model is Model.RATIONAL_1D:
        p = BENCHMARK_1D
        return classify_rational_exact(Rational1D(p["B"], p["m0"]), State1D(p["x0"], p["v0"]))
    p = BENCHMARK_2D
    return rational_confinement_interval(p["C"], p["m0"], p["r0"], p["rdot0"], p["thetadot0"])


def _agreement(confined: bool, q: QuantumClass) -> Agreement:
    if confined:
        return Agreement.CONSISTENT if q.bound else Agreement.CONTRADICTS
    return Agreement.CONSISTENT if q.kind is QuantumKind.FREE else Agreement.CONTRADICTS


def judge(scheme: OrderingScheme, model, m_quantum: Optional[int] = None) -> CorrespondenceVerdict:
    model = parse_model(model)
    classical = classical_verdict(model)
    if model is Model.RATIONAL_1D:
        quantum = classify_1d(scheme)
    else:
        if m_quantum is None:
            raise PreconditionError("the 2D model needs a magnetic quantum number m_quantum")
        quantum = classify_2d(scheme, m_quantum)
    confined = classical.confined
    return CorrespondenceVerdict(
        scheme=scheme,
        model=model,
        classical_class=classical,
        quantum_class=quantum,
        agreement=_agreement(confined, quantum),
        m_quantum=m_quantum if model is Model.RATIONAL_2D else None,
    )


@dataclass(frozen=True)
class SchemeSummary:
    scheme: OrderingScheme
    by_model: dict  # Model -> (Agreement, detail)
    headline: str


@dataclass(frozen=True)
class Report:
    cells: list
    summaries: list
    m_range: tuple
    notes: tuple = field(default_factory=tuple)

    def summary(self, name: str) -> SchemeSummary:
        for s in self.summaries:
            if s.scheme.name == name:
                return s
        raise KeyError(name)


def _aggregate(verdicts: Sequence[CorrespondenceVerdict]):
    consistent = [v.m_quantum for v in verdicts if v.agreement is Agreement.CONSISTENT]
    if len(consistent) == len(verdicts):
        return Agreement.CONSISTENT, ""
    if not consistent:
        return Agreement.CONTRADICTS, ""
    threshold = min(consistent)
    if all(v.agreement is Agreement.CONSISTENT for v in verdicts if abs(v.m_quantum) >= abs(threshold)):
        return Agreement.CONDITIONALLY_CONSISTENT, f"|m|>={abs(threshold)}"
    ok = ",".join(str(m) for m in consistent)
    return Agreement.CONDITIONALLY_CONSISTENT, f"m in {{{ok}}}"


def _headline(scheme, by_model, cells):
    aggs = [a for a, _ in by_model.values()]
    if all(a is Agreement.CONSISTENT for a in aggs):
        return "reliable: consistent in every model examined"
    one_d = [c for c in cells if c.scheme == scheme and c.model is Model.RATIONAL_1D]
    if one_d and one_d[0].agreement is Agreement.CONTRADICTS:
        if one_d[0].quantum_class.kind is QuantumKind.UNPHYSICAL:
            return "disqualified: unphysical 1D spectrum contradicts the unconfined classical motion"
        return "undecided: 1D bound states contradict the unconfined classical motion"
    return "undecided: consistency depends on the model or quantum number"


def full_report(
    schemes: Sequence[OrderingScheme],
    models: Iterable = (Model.RATIONAL_1D, Model.RATIONAL_2D),
    m_range: Iterable[int] = (1, 2, 3),
) -> Report:
    """Verdict matrix over schemes x models (x m for the 2D model)."""
    schemes = list(schemes)
    models = [parse_model(m) for m in models]
    m_range = tuple(int(m) for m in m_range)
    if not schemes or not models:
        raise PreconditionError("need at least one scheme and one model")
    if Model.RATIONAL_2D in models and not m_range:
        raise PreconditionError("the 2D model needs a non-empty m_range")
    cells = []
    summaries = []
    for s in schemes:
        by_model = {}
        for model in models:
            if model is Model.RATIONAL_1D:
                v = judge(s, model)
                cells.append(v)
                by_model[model] = (v.agreement, "")
            else:
                vs = [judge(s, model, m) for m in m_range]
                cells.extend(vs)
                by_model[model] = _aggregate(vs)
        summaries.append(SchemeSummary(s, by_model, _headline(s, by_model, cells)))
    return Report(cells=cells, summaries=summaries, m_range=m_range, notes=(EXTENSION_NOTE,))
