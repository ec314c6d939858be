"""Condition-list checkers: regularity, maps-to-zero, and core inclusion.

Each checker returns one :class:`ConditionReport` per condition.  Limit
conditions reduce to a scalar deviation window (for families, the per-row
worst member) decided by the ideal engine; boundedness conditions are
certified through declared row-norm bounds or geometric tails, and are
otherwise probed at the horizon with growth detection.  Universal
quantification over all small sets is approximated by a built-in battery
of certified ideal members plus any user-supplied test sets; verdicts are
scoped to that battery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import PreconditionError
from .ideals import (
    HorizonParams,
    IdealSpec,
    LimitDecision,
    Trilean,
    Verdict,
    decide_scalar_limit,
    ideal_contains,
)
from .model import MatrixFamily, OperatorEntry, OperatorMatrix
from .scalars import Scalar, lower, scalar_to_json, upper
from .sets import SetDescriptor, finite_set
from .transform import matrix_norm

__all__ = [
    "ConditionReport",
    "TargetOperator",
    "Witness",
    "built_in_battery",
    "check_core_inclusion",
    "check_maps_to_zero",
    "check_regular_family",
    "check_regular_singleton",
    "check_uniform_core_inclusion",
    "reevaluate_witness",
]


@dataclass(frozen=True)
class TargetOperator:
    """The limit operator, as an m-by-d block."""

    entry: OperatorEntry

    @staticmethod
    def identity(d: int = 1) -> "TargetOperator":
        return TargetOperator(OperatorEntry.identity(d))

    @staticmethod
    def zero(m: int = 1, d: int = 1) -> "TargetOperator":
        return TargetOperator(OperatorEntry.zeros(m, d))

    def component(self, i: int, j: int):
        return self.entry.component(i, j)


@dataclass(frozen=True)
class Witness:
    """Concrete reproducible counterexample location."""

    n: Optional[int] = None
    member: Optional[str] = None
    component: Optional[tuple] = None  # (i, j), zero-based
    test_set: Optional[SetDescriptor] = None
    value: Optional[Scalar] = None

    def to_json(self):
        return {
            "n": self.n,
            "member": self.member,
            "component": list(self.component) if self.component else None,
            "testSet": self.test_set.to_json() if self.test_set else None,
            "value": None if self.value is None else scalar_to_json(self.value),
        }


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    verdict: Verdict
    margin: Fraction
    witness: Optional[Witness] = None
    notes: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == Verdict.HOLDS

    def to_json(self):
        return {
            "condition": self.condition,
            "verdict": self.verdict.value,
            "margin": str(self.margin),
            "witness": self.witness.to_json() if self.witness else None,
            "notes": self.notes,
        }


def built_in_battery(ideal: IdealSpec, h: HorizonParams) -> list:
    """Certified members of the ideal used as default test sets."""
    battery = [finite_set({0}), finite_set(range(5))]
    if ideal.kind == "countably-generated":
        picks = sorted({0, len(ideal.base) - 1})
        for t in picks:
            comp = ideal.dual_set(t).complement()
            if comp not in battery and not comp.is_empty:
                battery.append(comp)
    return battery


def _merge_test_sets(ideal: IdealSpec, h: HorizonParams, supplied) -> list:
    battery = built_in_battery(ideal, h)
    for E in supplied or []:
        if E not in battery:
            battery.append(E)
    return battery


# ---------------------------------------------------------------------------
# boundedness and limit primitives
# ---------------------------------------------------------------------------


def _bounded_at_horizon(masses: Sequence[Fraction]):
    """Growth detection on a window of nonnegative row masses.

    Returns (verdict, margin, witness_index, note).  Certification happens
    at the caller via declared bounds; this is the uncertified fallback.
    """
    N = len(masses)
    peak = max(masses)
    if N < 8:
        return Verdict.UNKNOWN, peak, None, "window too small for growth detection"
    quarters = [
        max(masses[(q * N) // 4 : ((q + 1) * N) // 4]) for q in range(4)
    ]
    if quarters[0] < quarters[1] < quarters[2] < quarters[3]:
        wit = max(range(N), key=lambda n: (masses[n], n))
        return (
            Verdict.FAILS,
            peak,
            wit,
            "row masses grow through the whole window",
        )
    if quarters[3] <= max(quarters[:3]):
        return Verdict.HOLDS, peak, None, "no certificate; stable at horizon"
    return Verdict.UNKNOWN, peak, None, "late growth without a clear trend"


def _mass_bound(A: OperatorMatrix) -> Optional[Fraction]:
    """Certified bound on the entrywise row mass, via norms: mass <= d*norm."""
    bound = A.row_norm_bound
    if bound is None:
        bound = A.tail.uniform_row_norm_bound()
    return None if bound is None else bound * A.d


def _component_targets(m: int, d: int):
    return [(i, j) for i in range(m) for j in range(d)]


def _worst_window(members, per_member_value, N: int):
    """Per-row worst member of a scalar quantity; returns values and labels."""
    values, labels = [], []
    for n in range(N):
        best, best_label = None, None
        for A in members:
            v = per_member_value(A, n)
            if best is None or upper(v) > upper(best):
                best, best_label = v, A.label
        values.append(best)
        labels.append(best_label)
    return values, labels


def _limit_condition(
    label: str,
    members,
    per_member_value,
    target,
    ideal_j: IdealSpec,
    h: HorizonParams,
    component: Optional[tuple] = None,
    test_set: Optional[SetDescriptor] = None,
    notes: str = "",
) -> ConditionReport:
    devs, labels = _worst_window(
        members, lambda A, n: abs(per_member_value(A, n) - target), h.N
    )
    decision = decide_scalar_limit(devs, ideal_j, h)
    witness = None
    if decision.witness_n is not None:
        n = decision.witness_n
        witness = Witness(
            n=n,
            member=labels[n],
            component=component,
            test_set=test_set,
            value=per_member_value(_by_label(members, labels[n]), n),
        )
    note_parts = [notes] if notes else []
    if decision.certificate_t is not None:
        note_parts.append(f"dual-base certificate t={decision.certificate_t}")
    if decision.exception_set is not None:
        note_parts.append("violations lie inside the ideal")
    return ConditionReport(
        condition=label,
        verdict=decision.verdict,
        margin=decision.margin,
        witness=witness,
        notes="; ".join(note_parts),
    )


def _by_label(members, label):
    for A in members:
        if A.label == label:
            return A
    raise KeyError(label)


def _pick_worst(reports: Sequence[ConditionReport], label: str) -> ConditionReport:
    """Aggregate per-component or per-set reports into a single verdict."""
    fails = [r for r in reports if r.verdict == Verdict.FAILS]
    if fails:
        worst = max(fails, key=lambda r: r.margin)
        return ConditionReport(label, Verdict.FAILS, worst.margin, worst.witness, worst.notes)
    unknowns = [r for r in reports if r.verdict == Verdict.UNKNOWN]
    if unknowns:
        worst = max(unknowns, key=lambda r: r.margin)
        return ConditionReport(label, Verdict.UNKNOWN, worst.margin, worst.witness, worst.notes)
    margin = max((r.margin for r in reports), default=Fraction(0))
    notes = "; ".join(sorted({r.notes for r in reports if r.notes}))
    return ConditionReport(label, Verdict.HOLDS, margin, None, notes)


def _boundedness_reports(
    members, label_each: str, label_uniform: str, ideal_j: IdealSpec, h: HorizonParams, tol
):
    """The two boundedness conditions: per member, and uniformly along the
    dual filter."""
    per_member = []
    masses_by_member = {}
    for A in members:
        bound = _mass_bound(A)
        if bound is not None:
            per_member.append(
                ConditionReport(label_each, Verdict.HOLDS, bound, None, f"{A.label}: certified bound")
            )
            continue
        masses = [upper(A.row_mass(n, tol)) for n in range(h.N)]
        masses_by_member[A.label] = masses
        verdict, margin, wit, note = _bounded_at_horizon(masses)
        witness = None
        if wit is not None:
            witness = Witness(n=wit, member=A.label, value=A.row_mass(wit, tol))
        per_member.append(
            ConditionReport(label_each, verdict, margin, witness, f"{A.label}: {note}")
        )
    d1 = _pick_worst(per_member, label_each)

    bounds = [_mass_bound(A) for A in members]
    if all(b is not None for b in bounds):
        d2 = ConditionReport(
            label_uniform,
            Verdict.HOLDS,
            max(bounds),
            None,
            "certified bounds for every member",
        )
        return d1, d2

    def worst_mass(n):
        return max(
            upper(A.row_mass(n, tol)) if _mass_bound(A) is None else _mass_bound(A)
            for A in members
        )

    window = [worst_mass(n) for n in range(h.N)]
    outcomes = []
    for t, S in enumerate(ideal_j.probe_sets(h)[:8]):
        idx = [n for n in range(h.N) if n in S]
        if not idx:
            continue
        verdict, margin, wit, note = _bounded_at_horizon([window[n] for n in idx])
        if verdict == Verdict.HOLDS:
            d2 = ConditionReport(
                label_uniform, Verdict.HOLDS, margin, None, f"stable along dual set t={t}; {note}"
            )
            return d1, d2
        outcomes.append((verdict, margin, idx, t))
    if outcomes and all(v == Verdict.FAILS for v, _, _, _ in outcomes):
        verdict, margin, idx, t = outcomes[0]
        wit_n = max(idx, key=lambda n: (window[n], n))
        wit_member = max(members, key=lambda A: upper(A.row_mass(wit_n, tol))).label
        d2 = ConditionReport(
            label_uniform,
            Verdict.FAILS,
            margin,
            Witness(n=wit_n, member=wit_member, value=window[wit_n]),
            "growth along every probed dual set",
        )
    else:
        d2 = ConditionReport(
            label_uniform,
            Verdict.UNKNOWN,
            max(window),
            None,
            "no stable probed dual set",
        )
    return d1, d2


# ---------------------------------------------------------------------------
# checkers
# ---------------------------------------------------------------------------


def _labels(prefix: str):
    return [f"{prefix}{i}" for i in (1, 2, 3, 4)]


def check_regular_family(
    family: MatrixFamily,
    ideal_i: IdealSpec,
    ideal_j: IdealSpec,
    target: TargetOperator,
    h: HorizonParams,
    test_sets: Optional[Sequence[SetDescriptor]] = None,
    tol: Optional[Fraction] = None,
    label_prefix: str = "D",
) -> list:
    """Regularity conditions for a family against the target operator.

    Uniform limit conditions reduce to the per-row worst member; the
    quantification over all small column sets is scoped to the battery.
    """
    if not ideal_j.has_dual_base:
        raise PreconditionError(
            f"ideal {ideal_j.label!r} has no dual base; limit conditions need one"
        )
    tol = tol if tol is not None else h.eps / 16
    members = list(family)
    battery = _merge_test_sets(ideal_i, h, test_sets)
    l1, l2, l3, l4 = _labels(label_prefix)

    d1, d2 = _boundedness_reports(members, l1, l2, ideal_j, h, tol)

    comp_reports = [
        _limit_condition(
            l3,
            members,
            lambda A, n, i=i, j=j: A.row_component_sum(n, i, j, tol),
            target.component(i, j),
            ideal_j,
            h,
            component=(i, j),
        )
        for i, j in _component_targets(family.m, family.d)
    ]
    d3 = _pick_worst(comp_reports, l3)

    set_reports = []
    for E in battery:
        membership = ideal_contains(ideal_i, E, h)
        note = "" if membership == Trilean.YES else (
            f"test set not certified inside {ideal_i.label!r} ({membership.value})"
        )
        for i, j in _component_targets(family.m, family.d):
            set_reports.append(
                _limit_condition(
                    l4,
                    members,
                    lambda A, n, E=E, i=i, j=j: A.set_component_sum(n, E, i, j, tol),
                    Fraction(0),
                    ideal_j,
                    h,
                    component=(i, j),
                    test_set=E,
                    notes=note,
                )
            )
    d4 = _pick_worst(set_reports, l4)
    d4 = ConditionReport(
        d4.condition,
        d4.verdict,
        d4.margin,
        d4.witness,
        "; ".join(x for x in [d4.notes, f"scoped to {len(battery)} test sets"] if x),
    )
    return [d1, d2, d3, d4]


def check_regular_singleton(
    A: OperatorMatrix,
    ideal_i: IdealSpec,
    ideal_j: IdealSpec,
    target: TargetOperator,
    h: HorizonParams,
    test_sets: Optional[Sequence[SetDescriptor]] = None,
    tol: Optional[Fraction] = None,
) -> list:
    """Singleton checker; for d = m = 1 and identity target this is the
    classical Silverman-Toeplitz battery, labeled M1..M4."""
    prefix = "M" if A.d == 1 and A.m == 1 else "D"
    return check_regular_family(
        MatrixFamily.of(A), ideal_i, ideal_j, target, h, test_sets, tol, label_prefix=prefix
    )


def check_maps_to_zero(
    family: MatrixFamily,
    ideal_j: IdealSpec,
    h: HorizonParams,
    tol: Optional[Fraction] = None,
) -> list:
    """Conditions for mapping every bounded sequence uniformly to zero:
    boundedness plus absolute row sums vanishing."""
    if not ideal_j.has_dual_base:
        raise PreconditionError(
            f"ideal {ideal_j.label!r} has no dual base; limit conditions need one"
        )
    tol = tol if tol is not None else h.eps / 16
    members = list(family)
    d1, d2 = _boundedness_reports(members, "D1", "D2", ideal_j, h, tol)
    comp_reports = [
        _limit_condition(
            "D3#",
            members,
            lambda A, n, i=i, j=j: A.row_component_abs(n, i, j, tol),
            Fraction(0),
            ideal_j,
            h,
            component=(i, j),
        )
        for i, j in _component_targets(family.m, family.d)
    ]
    return [d1, d2, _pick_worst(comp_reports, "D3#")]


def _require_scalar(A: OperatorMatrix):
    if A.d != 1 or A.m != 1:
        raise PreconditionError("core inclusion checkers require d = m = 1")


def check_core_inclusion(
    A: OperatorMatrix,
    ideal_i: IdealSpec,
    h: HorizonParams,
    test_sets: Optional[Sequence[SetDescriptor]] = None,
    tol: Optional[Fraction] = None,
) -> list:
    """Core inclusion conditions: small-set column masses vanish, row sums
    tend to one, absolute row sums tend to one (ordinary limits)."""
    _require_scalar(A)
    tol = tol if tol is not None else h.eps / 16
    norm = matrix_norm(A, h.N, tol)
    if not norm.certified:
        raise PreconditionError(
            f"matrix {A.label!r} is not certified bounded; core inclusion needs "
            f"a member of (linf, linf)"
        )
    fin = IdealSpec.fin()
    battery = _merge_test_sets(ideal_i, h, test_sets)
    members = [A]

    set_reports = []
    for E in battery:
        membership = ideal_contains(ideal_i, E, h)
        note = "" if membership == Trilean.YES else (
            f"test set not certified inside {ideal_i.label!r} ({membership.value})"
        )
        set_reports.append(
            _limit_condition(
                "C1",
                members,
                lambda M, n, E=E: M.set_component_abs(n, E, 0, 0, tol),
                Fraction(0),
                fin,
                h,
                test_set=E,
                notes=note,
            )
        )
    c1 = _pick_worst(set_reports, "C1")
    c2 = _limit_condition(
        "C2", members, lambda M, n: M.row_component_sum(n, 0, 0, tol), Fraction(1), fin, h
    )
    c3 = _limit_condition(
        "C3", members, lambda M, n: M.row_component_abs(n, 0, 0, tol), Fraction(1), fin, h
    )
    return [c1, c2, c3]


def check_uniform_core_inclusion(
    family: MatrixFamily,
    ideal_i: IdealSpec,
    h: HorizonParams,
    test_sets: Optional[Sequence[SetDescriptor]] = None,
    tol: Optional[Fraction] = None,
) -> list:
    """Uniform core inclusion over a norm-bounded family (worst member
    reduction of the singleton conditions)."""
    for A in family:
        _require_scalar(A)
    tol = tol if tol is not None else h.eps / 16
    for A in family:
        if not matrix_norm(A, h.N, tol).certified:
            raise PreconditionError(
                f"family member {A.label!r} is not certified bounded"
            )
    fin = IdealSpec.fin()
    members = list(family)
    battery = _merge_test_sets(ideal_i, h, test_sets)

    set_reports = []
    for E in battery:
        membership = ideal_contains(ideal_i, E, h)
        note = "" if membership == Trilean.YES else (
            f"test set not certified inside {ideal_i.label!r} ({membership.value})"
        )
        set_reports.append(
            _limit_condition(
                "L1",
                members,
                lambda A, n, E=E: A.set_component_abs(n, E, 0, 0, tol),
                Fraction(0),
                fin,
                h,
                test_set=E,
                notes=note,
            )
        )
    l1 = _pick_worst(set_reports, "L1")
    l2 = _limit_condition(
        "L2", members, lambda A, n: A.row_component_sum(n, 0, 0, tol), Fraction(1), fin, h
    )
    l3 = _limit_condition(
        "L3", members, lambda A, n: A.row_component_abs(n, 0, 0, tol), Fraction(1), fin, h
    )
    return [l1, l2, l3]


# ---------------------------------------------------------------------------
# witness replay
# ---------------------------------------------------------------------------

_QUANTITY_BY_CONDITION = {
    "1": "row-mass",
    "2": "row-mass",
    "3": "row-sum",
    "4": "set-sum",
    "3#": "abs-row-sum",
}

_CORE_QUANTITY = {"1": "set-abs-sum", "2": "row-sum", "3": "abs-row-sum"}


def reevaluate_witness(
    members,
    report: ConditionReport,
    h: HorizonParams,
    tol: Optional[Fraction] = None,
) -> Scalar:
    """Recompute the quantity a witness points at; exact mode reproduces
    the recorded value bit for bit."""
    tol = tol if tol is not None else h.eps / 16
    w = report.witness
    if w is None or w.n is None:
        raise PreconditionError(f"report {report.condition} carries no witness")
    A = _by_label(members, w.member) if w.member else members[0]
    i, j = w.component if w.component else (0, 0)
    suffix = report.condition[1:]
    table = _CORE_QUANTITY if report.condition[0] in "CL" else _QUANTITY_BY_CONDITION
    quantity = table.get(suffix)
    if quantity == "row-mass":
        return A.row_mass(w.n, tol)
    if quantity == "row-sum":
        return A.row_component_sum(w.n, i, j, tol)
    if quantity == "abs-row-sum":
        return A.row_component_abs(w.n, i, j, tol)
    if quantity == "set-sum":
        return A.set_component_sum(w.n, w.test_set, i, j, tol)
    if quantity == "set-abs-sum":
        return A.set_component_abs(w.n, w.test_set, i, j, tol)
    raise PreconditionError(f"no replay rule for condition {report.condition!r}")
