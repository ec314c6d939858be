"""Built-in corpus of matrices, sequences, ideals, and families.

These are the fixtures the oracles and the acceptance battery run
against.  Everything is deterministic; constructors return fresh objects
so per-matrix caches never leak between runs.
"""

from __future__ import annotations

from fractions import Fraction

from .ideals import IdealSpec
from .model import (
    MatrixFamily,
    alternating_cesaro_matrix,
    cesaro_matrix,
    constant_sequence,
    delayed_cesaro_matrix,
    euler_matrix,
    eventually_constant_sequence,
    formula_sequence,
    geometric_rows_matrix,
    identity_matrix,
    indicator_sequence,
    ones_lower_matrix,
    periodic_sequence,
    unit_shift_matrix,
    zero_matrix,
    banded_matrix,
)
from .sets import SetDescriptor, progression
from .sigma import SigmaMap, sigma_matrix

__all__ = [
    "evens",
    "odds",
    "fin",
    "density_zero",
    "cg_evens",
    "standard_ideals",
    "alternating01",
    "standard_sequences",
    "scalar_families",
    "silverman_toeplitz_battery",
    "equivalence_combinations",
    "sigma_cross_validation_matrices",
    "smoothing_band",
    "unit_even",
    "unit_odd",
]


def evens() -> SetDescriptor:
    return progression(2, 0)


def odds() -> SetDescriptor:
    return progression(2, 1)


def fin() -> IdealSpec:
    return IdealSpec.fin()


def density_zero() -> IdealSpec:
    return IdealSpec.density_zero()


def cg_evens() -> IdealSpec:
    """The ideal generated by the even numbers (dual base: tails of odds)."""
    return IdealSpec.countably_generated([odds()], label="gen-evens")


def standard_ideals() -> list:
    return [fin(), density_zero(), cg_evens()]


def alternating01():
    return periodic_sequence([1, 0], label="alt01")


def standard_sequences() -> list:
    return [
        alternating01(),
        constant_sequence(1, label="one"),
        constant_sequence(2, label="two"),
        periodic_sequence([0, 1, 2], label="per012"),
        periodic_sequence([1, -1], label="altpm"),
        eventually_constant_sequence([9, 9, 9, 9, 9], 3, label="eventually3"),
        indicator_sequence(evens(), label="ind-evens"),
        formula_sequence(
            lambda k: (Fraction(1, k + 1),), 1, label="harmonic", kind="harmonic"
        ),
        formula_sequence(
            lambda k: (Fraction((-1) ** k, k + 1),),
            1,
            label="alt-decay",
            kind="alt-decay",
        ),
    ]


def smoothing_band() -> "OperatorMatrix":
    return banded_matrix(
        0, 1, 1, {(0, 0): Fraction(1, 2), (0, 1): Fraction(1, 2)}, label="smooth"
    )


def unit_even():
    return unit_shift_matrix(2, 0, label="unit-even")


def unit_odd():
    return unit_shift_matrix(2, 1, label="unit-odd")


def scalar_families() -> list:
    """Norm-bounded scalar families for the selection oracles."""
    return [
        MatrixFamily.of(cesaro_matrix()),
        MatrixFamily.of(identity_matrix()),
        MatrixFamily.of(cesaro_matrix(), identity_matrix(label="id2")),
        MatrixFamily.of(unit_even(), unit_odd()),
        MatrixFamily.of(cesaro_matrix(), zero_matrix(label="zero2")),
        MatrixFamily.of(cesaro_matrix(), cesaro_matrix(Fraction(-1), label="neg-cesaro")),
        MatrixFamily.of(*(delayed_cesaro_matrix(p, label=f"delay{p}") for p in range(3))),
        MatrixFamily.of(*(sigma_matrix(SigmaMap.shift(), nu) for nu in range(3))),
        MatrixFamily.of(cesaro_matrix(), euler_matrix()),
        MatrixFamily.of(identity_matrix(), unit_shift_matrix(1, 1, label="shifted-id")),
        MatrixFamily.of(smoothing_band(), cesaro_matrix(label="cesaro2")),
        MatrixFamily.of(cesaro_matrix(), identity_matrix(label="id3"), euler_matrix(label="euler3")),
    ]


def silverman_toeplitz_battery() -> dict:
    """The fixed accept/reject battery: label -> (matrix, should_accept)."""
    return {
        "cesaro": (cesaro_matrix(), True),
        "identity": (identity_matrix(), True),
        "euler": (euler_matrix(), True),
        "row-sum-2": (cesaro_matrix(Fraction(2), label="row-sum-2"), False),
        "column": (unit_shift_matrix(0, 0, label="column"), False),
        "ones-lower": (ones_lower_matrix(), False),
    }


def equivalence_combinations() -> list:
    """(family, sequence, ideal) triples for the equivalence harness."""
    combos = []
    ideals = {"fin": fin(), "dz": density_zero(), "cge": cg_evens()}
    seqs = {s.label: s for s in standard_sequences()}
    families = {
        "cesaro": MatrixFamily.of(cesaro_matrix()),
        "identity": MatrixFamily.of(identity_matrix()),
        "pair": MatrixFamily.of(cesaro_matrix(), identity_matrix(label="id2")),
        "unit-eo": MatrixFamily.of(unit_even(), unit_odd()),
        "cz": MatrixFamily.of(cesaro_matrix(), zero_matrix(label="zero2")),
        "cnc": MatrixFamily.of(
            cesaro_matrix(), cesaro_matrix(Fraction(-1), label="neg-cesaro")
        ),
        "delays": MatrixFamily.of(
            *(delayed_cesaro_matrix(p, label=f"delay{p}") for p in range(3))
        ),
        "means": MatrixFamily.of(*(sigma_matrix(SigmaMap.shift(), nu) for nu in range(3))),
        "ce": MatrixFamily.of(cesaro_matrix(), euler_matrix()),
        "shifts": MatrixFamily.of(
            identity_matrix(), unit_shift_matrix(1, 1, label="shifted-id")
        ),
    }
    picks = [
        ("cesaro", "alt01", "fin"),
        ("cesaro", "one", "fin"),
        ("cesaro", "harmonic", "fin"),
        ("cesaro", "per012", "fin"),
        ("cesaro", "alt01", "dz"),
        ("cesaro", "eventually3", "cge"),
        ("identity", "alt01", "fin"),
        ("identity", "eventually3", "fin"),
        ("identity", "ind-evens", "cge"),
        ("identity", "harmonic", "dz"),
        ("pair", "one", "fin"),
        ("pair", "alt01", "fin"),
        ("pair", "harmonic", "fin"),
        ("unit-eo", "alt01", "fin"),
        ("unit-eo", "one", "fin"),
        ("unit-eo", "per012", "fin"),
        ("unit-eo", "alt01", "cge"),
        ("cz", "one", "fin"),
        ("cnc", "one", "fin"),
        ("cnc", "alt01", "fin"),
        ("delays", "one", "fin"),
        ("delays", "alt01", "fin"),
        ("means", "alt01", "fin"),
        ("means", "one", "dz"),
        ("ce", "alt01", "fin"),
        ("ce", "harmonic", "fin"),
        ("shifts", "alt01", "fin"),
        ("shifts", "eventually3", "fin"),
    ]
    for fam, seq, ideal in picks:
        combos.append((families[fam], seqs[seq], ideals[ideal]))
    return combos


def sigma_cross_validation_matrices() -> list:
    """Matrices exercised by the dual-route almost-regularity check."""

    def alt_diag():
        from .model import OperatorEntry, OperatorMatrix, FiniteSupportTail

        def entry(n, k):
            if k == n:
                return OperatorEntry.scalar(Fraction((-1) ** n))
            return OperatorEntry.zeros(1, 1)

        return OperatorMatrix(
            "alt-diag",
            1,
            1,
            entry,
            FiniteSupportTail("row"),
            row_norm_bound=Fraction(1),
            kind="alt-diag",
        )

    return [
        cesaro_matrix(),
        identity_matrix(),
        euler_matrix(),
        cesaro_matrix(Fraction(2), label="row-sum-2"),
        unit_shift_matrix(0, 0, label="column"),
        ones_lower_matrix(),
        alt_diag(),
        smoothing_band(),
    ]
