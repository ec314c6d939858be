from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from summa.corpus import evens, fin, unit_even
from summa.errors import DivergentGroupNorm, NotInDomain
from summa.ideals import HorizonParams, Trilean
from summa.model import (
    cesaro_matrix,
    constant_sequence,
    geometric_rows_matrix,
    identity_matrix,
    ones_lower_matrix,
    ones_matrix,
    oscillating_rows_matrix,
    periodic_sequence,
    unit_shift_matrix,
    zero_matrix,
)
from summa.scalars import lower, upper, width
from summa.sets import SetDescriptor, finite_set, full_set, progression
from summa.transform import (
    NormVerdict,
    group_norm,
    in_domain,
    matrix_norm,
    row_apply,
    scalar_window,
    transform,
)

H = HorizonParams(N=64, eps=F(1, 16))


def test_row_apply_cesaro_alternating():
    # (1 + 0 + 1 + 0) / 4
    row = row_apply(cesaro_matrix(), 3, periodic_sequence([1, 0]))
    assert row.value == (F(1, 2),) and row.trunc_error == 0


def test_row_apply_identity():
    x = periodic_sequence([3, 1, 4])
    for n in (0, 1, 5):
        assert row_apply(identity_matrix(), n, x).value == x.term(n)


def test_row_apply_geometric_truncation():
    # entries 2^-(k+1), constant input 1, geometric tail certificate
    A = geometric_rows_matrix(F(1, 2), F(1, 2))
    row = row_apply(A, 0, constant_sequence(1), tol=F(1, 2**10))
    assert row.trunc_error <= F(1, 2**10)
    assert abs(row.value[0] - 1) <= F(1, 2**10)


def test_transform_prefix_values():
    values = scalar_window(cesaro_matrix(), periodic_sequence([1, 0]), 4)
    assert values == [F(1), F(1, 2), F(2, 3), F(1, 2)]
    zeros = transform(zero_matrix(), constant_sequence(5), 4)
    assert all(r.value == (F(0),) for r in zeros)


def test_rowselect_identity_rows_return_prefix():
    from summa.model import MatrixFamily
    from summa.selection import SelectionSeq, select_matrix

    fam = MatrixFamily.of(identity_matrix(), zero_matrix(label="z"))
    B = select_matrix(fam, SelectionSeq(prefix=(), period=(0,), arity=2))
    x = periodic_sequence([2, 7])
    assert [row_apply(B, n, x).value[0] for n in range(4)] == [2, 7, 2, 7]


def test_group_norm_cesaro():
    assert group_norm(cesaro_matrix(), 4) == 1
    # entries at k = 0, 2, 4 of row 4
    assert group_norm(cesaro_matrix(), 4, evens()) == F(3, 5)


def test_group_norm_block_identity():
    A = cesaro_matrix(dim=2)
    assert group_norm(A, 4) == 1


def test_group_norm_geometric_enclosure():
    A = geometric_rows_matrix(F(1, 2), F(1, 2))
    g = group_norm(A, 0, tol=F(1, 1024))
    assert lower(g) <= 1 <= upper(g)
    assert width(g) <= F(1, 1024)


def test_group_norm_threshold():
    with pytest.raises(DivergentGroupNorm):
        group_norm(ones_matrix(), 0, threshold=F(10))


def test_group_norm_additive_over_disjoint_sets():
    A = cesaro_matrix()
    for n in (3, 9):
        ge = group_norm(A, n, evens())
        go = group_norm(A, n, progression(2, 1))
        assert ge + go == group_norm(A, n, full_set())


@settings(max_examples=40)
@given(
    st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=12), min_size=1, max_size=8),
    st.sets(st.integers(0, 7), max_size=4),
)
def test_group_norm_matches_brute_force_on_dense_rows(row, members):
    from summa.model import dense_prefix_matrix, FiniteSupportTail

    A = dense_prefix_matrix([row], FiniteSupportTail(len(row)), label="row")
    E = finite_set(members)
    expected = sum((abs(v) for k, v in enumerate(row) if k in members), F(0))
    assert group_norm(A, 0, E) == expected


def test_matrix_norm_verdicts():
    res = matrix_norm(cesaro_matrix(), 32)
    assert res.value == 1 and res.verdict == NormVerdict.CERTIFIED_FINITE
    res = matrix_norm(ones_lower_matrix(), 32)
    assert res.value == 32 and res.verdict == NormVerdict.UNBOUNDED_AT_HORIZON
    res = matrix_norm(zero_matrix(), 32)
    assert res.value == 0 and res.verdict == NormVerdict.CERTIFIED_FINITE


def test_in_domain():
    assert in_domain(cesaro_matrix(), periodic_sequence([1, 0]), H) == Trilean.YES
    assert in_domain(geometric_rows_matrix(), constant_sequence(7), H) == Trilean.YES
    # constant rows against constant input: terms never vanish
    assert in_domain(ones_matrix(), constant_sequence(1), H) == Trilean.NO
    # no certificate, oscillating decaying terms
    assert in_domain(oscillating_rows_matrix(), periodic_sequence([1, -1]), H) == Trilean.UNKNOWN


def test_row_apply_requires_certificate():
    with pytest.raises(NotInDomain):
        row_apply(ones_matrix(), 0, constant_sequence(1))


def test_linearity_of_row_apply():
    A = cesaro_matrix()
    x = periodic_sequence([1, 0])
    y = periodic_sequence([0, 2, 1])
    combo = periodic_sequence(
        [3 * x.term(k)[0] - 2 * y.term(k)[0] for k in range(6)], label="combo"
    )
    for n in (0, 4, 11):
        vx = row_apply(A, n, x).value[0]
        vy = row_apply(A, n, y).value[0]
        vc = row_apply(A, n, combo).value[0]
        assert vc == 3 * vx - 2 * vy


def test_row_norm_dominates_transform():
    A = cesaro_matrix()
    x = periodic_sequence([1, -1])
    for n in (0, 3, 10):
        value = abs(row_apply(A, n, x).value[0])
        assert value <= upper(group_norm(A, n)) * x.bound
