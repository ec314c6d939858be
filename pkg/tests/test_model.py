import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from summa.errors import DimensionMismatch, InvalidTailModel, SchemaError
from summa.model import (
    BandedTail,
    GeometricTail,
    MatrixFamily,
    OperatorEntry,
    banded_matrix,
    cesaro_matrix,
    dense_prefix_matrix,
    entry_norm,
    euler_matrix,
    eventually_constant_sequence,
    identity_matrix,
    indicator_sequence,
    periodic_sequence,
    unit_shift_matrix,
    FiniteSupportTail,
)
from summa.sets import progression

rational = st.fractions(min_value=-4, max_value=4, max_denominator=16)


def entry_strategy(max_dim=3):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda d: st.lists(
                st.lists(rational, min_size=d, max_size=d), min_size=m, max_size=m
            ).map(OperatorEntry.of)
        )
    )


def oracle_norm(e):
    # independent oracle: the operator 1-norm is attained at a basis vector
    best = F(0)
    for j in range(e.cols):
        basis = tuple(F(1) if jj == j else F(0) for jj in range(e.cols))
        image = e.apply(basis)
        best = max(best, sum(abs(c) for c in image))
    return best


def test_entry_norm_examples():
    assert entry_norm(OperatorEntry.scalar(F(-1, 2))) == F(1, 2)
    assert entry_norm(OperatorEntry.identity(2)) == 1
    # columns sum to 4 and 6
    assert entry_norm(OperatorEntry.of([[1, 2], [3, -4]])) == 6


@given(entry_strategy())
def test_entry_norm_matches_basis_oracle(e):
    assert entry_norm(e) == oracle_norm(e)


@given(entry_strategy(2), entry_strategy(2))
def test_entry_norm_subadditive_and_homogeneous(a, b):
    if (a.rows, a.cols) == (b.rows, b.cols):
        assert entry_norm(a.add(b)) <= entry_norm(a) + entry_norm(b)
    assert entry_norm(a.scale(F(-3, 2))) == F(3, 2) * entry_norm(a)


def test_entry_apply_and_shape_checks():
    e = OperatorEntry.of([[1, 0], [2, -1]])
    assert e.apply((F(1), F(2))) == (F(1), F(0))
    with pytest.raises(DimensionMismatch):
        e.apply((F(1),))
    with pytest.raises(DimensionMismatch):
        OperatorEntry.of([[1], [1, 2]])


def test_cesaro_entries_and_support():
    c = cesaro_matrix()
    assert c.entry(3, 2).component(0, 0) == F(1, 4)
    assert c.entry(3, 4).is_zero()
    assert c.support_end(3) == 4


def test_euler_entries_are_binomial():
    e = euler_matrix()
    for n in (0, 3, 7):
        for k in range(n + 1):
            assert e.entry(n, k).component(0, 0) == F(math.comb(n, k), 2**n)


def test_builtin_aggregate_hooks_match_generic_sums():
    tol = F(1, 1024)
    evens = progression(2, 0)
    mats = [
        cesaro_matrix(),
        cesaro_matrix(F(2), label="x2"),
        euler_matrix(),
        identity_matrix(),
        unit_shift_matrix(2, 1, label="odd"),
    ]
    for A in mats:
        for n in (0, 1, 5, 12):
            generic_sum = sum(
                (e.component(0, 0) for _, e in A.row_entries(n)), F(0)
            )
            assert A.row_component_sum(n, 0, 0, tol) == generic_sum
            generic_set = sum(
                (A.entry(n, k).component(0, 0) for k in evens.members_below(A.support_end(n))),
                F(0),
            )
            assert A.set_component_sum(n, evens, 0, 0, tol) == generic_set
            generic_abs = sum(
                (abs(e.component(0, 0)) for _, e in A.row_entries(n)), F(0)
            )
            assert A.row_component_abs(n, 0, 0, tol) == generic_abs


def test_banded_matrix_rejects_entries_outside_band():
    with pytest.raises(InvalidTailModel):
        banded_matrix(2, 1, 1, {(0, 2): F(1)})
    ok = banded_matrix(0, 1, 2, {(0, 0): F(1, 2), (0, 1): F(1, 2), (1, 0): F(1)})
    assert ok.entry(0, 1).component(0, 0) == F(1, 2)
    assert ok.entry(1, 0).is_zero()  # below the band start at row 1? offset -1 outside
    assert ok.entry(1, 1).component(0, 0) == F(1)


def test_matrix_validation_catches_tail_violations():
    bad = cesaro_matrix()
    bad.tail = FiniteSupportTail(lambda n: max(1, n))  # claims support ends early
    with pytest.raises(InvalidTailModel):
        bad.validate()


def test_geometric_tail_validation():
    with pytest.raises(InvalidTailModel):
        GeometricTail(F(1), F(3, 2))
    tail = GeometricTail(F(1), F(1, 2))
    assert tail.tail_norm_bound(0, 3) == F(1, 4)
    assert tail.uniform_row_norm_bound() == 2


def test_dense_prefix_matrix():
    m = dense_prefix_matrix([[1, 0], [0, 1]], FiniteSupportTail(2), label="dp")
    assert m.entry(0, 0).component(0, 0) == 1
    assert m.entry(5, 0).is_zero()


def test_family_checks_dimensions_and_labels():
    with pytest.raises(SchemaError):
        MatrixFamily.of(cesaro_matrix(), cesaro_matrix())
    fam = MatrixFamily.of(cesaro_matrix(), identity_matrix())
    assert fam.kappa == 2 and fam.d == fam.m == 1


def test_sequence_declarations_validated():
    from summa.model import EventuallyConstant, VectorSequence

    with pytest.raises(SchemaError):
        # declared tail contradicts the generator
        VectorSequence(
            "liar",
            1,
            lambda k: (F(k),),
            EventuallyConstant((F(0),), 0),
            bound=F(100),
        )

    x = periodic_sequence([1, 0])
    assert x.term(7) == (F(0),)
    assert x.bound == 1


def test_indicator_sequence_tracks_set():
    x = indicator_sequence(progression(3, 1))
    assert [x.term(k)[0] for k in range(7)] == [0, 1, 0, 0, 1, 0, 0]
    assert x.tail.kind == "periodic"
