from fractions import Fraction as F

import pytest

from summa.corpus import cg_evens, density_zero, evens, fin, odds
from summa.errors import HorizonTooSmall, SchemaError
from summa.ideals import (
    HorizonParams,
    IdealSpec,
    Trilean,
    cluster_points,
    core,
    detect_tail,
    ideal_contains,
    ideal_lim,
    ideal_liminf,
    ideal_limsup,
    ideal_subset_certified,
    view_of,
)
from summa.model import (
    constant_sequence,
    eventually_constant_sequence,
    formula_sequence,
    indicator_sequence,
    periodic_sequence,
)
from summa.sets import finite_set, progression, tails

H = HorizonParams(N=64, eps=F(1, 16))


# -- membership --------------------------------------------------------------


def test_fin_membership():
    assert ideal_contains(fin(), finite_set(range(10)), H) == Trilean.YES
    assert ideal_contains(fin(), evens(), H) == Trilean.NO


def test_density_zero_membership():
    # the evens have density 1/2 > 0
    assert ideal_contains(density_zero(), evens(), H) == Trilean.NO
    assert ideal_contains(density_zero(), finite_set({4, 400}), H) == Trilean.YES


def test_countably_generated_membership():
    gen = cg_evens()
    assert ideal_contains(gen, evens(), H) == Trilean.YES
    assert ideal_contains(gen, evens().union(finite_set({1, 3})), H) == Trilean.YES
    assert ideal_contains(gen, odds(), H) == Trilean.NO
    assert ideal_contains(gen, progression(4, 1), H) == Trilean.NO


def test_countably_generated_incomplete_base_gives_unknown():
    gen = IdealSpec.countably_generated([odds()], label="partial", complete=False)
    assert ideal_contains(gen, odds(), H) == Trilean.UNKNOWN
    assert ideal_contains(gen, evens(), H) == Trilean.YES


def test_dual_base_is_normalized_decreasing():
    gen = IdealSpec.countably_generated([odds(), tails(0)], label="g")
    s0, s1 = gen.dual_set(0), gen.dual_set(1)
    assert s1 == s1.intersection(s0)
    assert s1.first_member() >= 1
    # deep sets keep shrinking below the explicit base
    assert gen.dual_set(9).first_member() >= 9


def test_base_rejects_finite_sets():
    with pytest.raises(SchemaError):
        IdealSpec.countably_generated([finite_set(range(5))], label="bad")


def test_ideal_subset_certified():
    assert ideal_subset_certified(fin(), density_zero(), H)
    assert ideal_subset_certified(fin(), cg_evens(), H)
    assert not ideal_subset_certified(cg_evens(), fin(), H)


# -- ideal limits ------------------------------------------------------------


def test_alternating_diverges_under_fin():
    alt = periodic_sequence([1, 0])
    res = ideal_lim(alt, fin(), H)
    assert res.status == "diverges"
    assert sorted(v[0] for v in res.separators) == [0, 1]


def test_eventually_constant_converges():
    x = eventually_constant_sequence([9, 9, 9, 9, 9], 3)
    res = ideal_lim(x, fin(), H)
    assert res.status == "converges"
    assert res.value == (F(3),)
    assert res.certified


def test_indicator_converges_under_generated_ideal():
    # 1 on evens, 0 on odds; the evens generate the ideal, so the limit is 0
    x = indicator_sequence(evens())
    res = ideal_lim(x, cg_evens(), H)
    assert res.status == "converges"
    assert res.value == (F(0),)
    assert ideal_lim(x, fin(), H).status == "diverges"


def test_formula_tail_converges_within_eps():
    harmonic = formula_sequence(lambda k: (F(1, k + 1),), 1, label="harmonic")
    res = ideal_lim(harmonic, fin(), H)
    assert res.status == "converges"
    assert abs(res.value[0]) <= H.eps
    assert not res.certified


def test_formula_tail_raises_when_undecidable():
    # oscillation too wide to certify a limit, too narrow to separate
    # cluster values; the drift defeats periodicity detection
    wobble = formula_sequence(
        lambda k: ((-1) ** k * F(3, 128) + F(k, 10**6),), 1, label="wobble"
    )
    with pytest.raises(HorizonTooSmall):
        ideal_lim(wobble, fin(), HorizonParams(N=16, eps=F(1, 64)))


# -- cluster points, limsup, cores -------------------------------------------


def test_cluster_points_alternating():
    alt = periodic_sequence([1, 0])
    report = cluster_points(alt, fin(), H)
    assert report.exact and report.values == (F(0), F(1))
    report_dz = cluster_points(alt, density_zero(), H)
    assert report_dz.values == (F(0), F(1))


def test_cluster_points_eventually_constant():
    x = eventually_constant_sequence([7], 3)
    report = cluster_points(x, fin(), H)
    assert report.values == (F(3),)


def test_cluster_points_under_generated_ideal():
    # the even-indexed values are killed by the ideal
    x = indicator_sequence(evens())
    report = cluster_points(x, cg_evens(), H)
    assert report.values == (F(0),)


def test_limsup_liminf_classical():
    alt = periodic_sequence([1, 0])
    assert ideal_limsup(alt, fin(), H) == 1
    assert ideal_liminf(alt, fin(), H) == 0
    null = formula_sequence(lambda k: (F(1, k + 1),), 1, label="h")
    assert abs(ideal_limsup(null, fin(), H)) <= H.eps
    assert abs(ideal_liminf(null, fin(), H)) <= H.eps


def test_limsup_with_density_zero_exceptions():
    # 1 only on a sparse finite set: the tail is identically 0
    x = eventually_constant_sequence([0, 1, 0, 1, 1], 0)
    assert ideal_limsup(x, density_zero(), H) == 0


def test_core_examples():
    pm = periodic_sequence([1, -1])
    assert core(pm, fin(), H) == (F(-1), F(1))
    assert core(constant_sequence(2), fin(), H) == (F(2), F(2))
    per3 = periodic_sequence([0, 1, 2])
    assert core(per3, fin(), H) == (F(0), F(2))


def brute_force_periodic_limsup(block, tail_start=0):
    # classical limsup of an eventually periodic sequence: max of the block
    return max(block)


def test_fin_limsup_matches_brute_force_oracle():
    for block in ([1, 0], [0, 1, 2], [3], [-2, 5, -2, 1]):
        x = periodic_sequence(block)
        assert ideal_limsup(x, fin(), H) == brute_force_periodic_limsup(block)


def test_cluster_nonempty_for_bounded_sequences():
    seqs = [
        periodic_sequence([1, 0]),
        constant_sequence(F(1, 3)),
        formula_sequence(lambda k: (F((-1) ** k, k + 1),), 1, label="altdecay"),
    ]
    for ideal in (fin(), density_zero(), cg_evens()):
        for x in seqs:
            report = cluster_points(x, ideal, H)
            assert (report.values and len(report.values) > 0) or report.intervals


def test_lim_iff_liminf_equals_limsup():
    seqs = [
        periodic_sequence([1, 0]),
        constant_sequence(3),
        eventually_constant_sequence([5, 5], 1),
        periodic_sequence([0, 1, 2]),
        indicator_sequence(evens()),
    ]
    for ideal in (fin(), density_zero(), cg_evens()):
        for x in seqs:
            res = ideal_lim(x, ideal, H)
            lo, hi = core(x, ideal, H)
            if res.status == "converges":
                assert lo == hi == res.value[0]
            else:
                assert lo < hi


def test_monotonicity_of_cores_under_ideal_inclusion():
    # Fin <= generated-by-evens: cluster sets shrink, cores nest
    seqs = [periodic_sequence([1, 0]), indicator_sequence(evens()), periodic_sequence([0, 1, 2])]
    for x in seqs:
        small = core(x, cg_evens(), H)
        big = core(x, fin(), H)
        assert big[0] <= small[0] and small[1] <= big[1]


def test_detect_tail_finds_period():
    values = [(F(k % 3),) for k in range(40)]
    info = detect_tail(values)
    assert info is not None and info.period == 3 and not info.certified
    garbage = [(F(k * k % 97, 7),) for k in range(40)]
    assert detect_tail(garbage) is None


def test_view_of_certified_tails():
    x = periodic_sequence([1, 0])
    view = view_of(x, 16)
    assert view.tail.certified and view.tail.period == 2
