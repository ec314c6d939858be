from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from summa.errors import SchemaError
from summa.sets import SetDescriptor, empty_set, finite_set, progression, tails


def brute_members(desc, limit=300):
    return [n for n in range(limit) if n in desc]


def test_progression_membership():
    evens = progression(2, 0)
    assert brute_members(evens, 10) == [0, 2, 4, 6, 8]
    assert evens.density() == F(1, 2)
    assert not evens.is_finite


def test_finite_set():
    s = finite_set({3, 1, 4})
    assert brute_members(s, 10) == [1, 3, 4]
    assert s.is_finite
    assert s.density() == 0
    assert s.count_below(4) == 2


def test_union_intersection_complement_against_brute_force():
    evens = progression(2, 0)
    threes = progression(3, 1)  # 1, 4, 7, ...
    spot = finite_set({5, 100})
    combined = evens.union(threes).difference(spot)
    expected = sorted(
        (set(brute_members(evens)) | set(brute_members(threes))) - {5, 100}
    )
    assert brute_members(combined) == expected

    comp = combined.complement()
    assert brute_members(comp) == [n for n in range(300) if n not in combined]
    assert comp.complement() == combined


def test_density_of_progression_union():
    evens = progression(2, 0)
    fours = progression(4, 1)  # density 1/4, disjoint from evens
    assert evens.union(fours).density() == F(3, 4)
    assert evens.intersection(progression(4, 0)).density() == F(1, 4)


def test_count_below_matches_brute_force():
    desc = progression(3, 2).union(finite_set({0, 7})).difference(finite_set({8}))
    for limit in (0, 1, 5, 17, 100):
        assert desc.count_below(limit) == len(brute_members(desc, limit))


def test_tails_and_restrict_min():
    t = tails(5)
    assert 4 not in t and 5 in t
    odds = progression(2, 1)
    late_odds = odds.restrict_min(10)
    assert brute_members(late_odds, 16) == [11, 13, 15]


def test_serialization_roundtrip():
    desc = progression(6, 1).union(finite_set({0, 2})).difference(finite_set({7}))
    again = SetDescriptor.from_json(desc.to_json())
    assert again == desc
    assert brute_members(again) == brute_members(desc)


def test_from_json_validates():
    with pytest.raises(SchemaError):
        SetDescriptor.from_json({"progressions": [[0, 1]]})
    with pytest.raises(SchemaError):
        SetDescriptor.from_json({"bogus": []})
    assert SetDescriptor.from_json({}) == empty_set()


small_descriptors = st.builds(
    lambda progs, inc, exc: SetDescriptor.from_json(
        {"progressions": progs, "include": inc, "exclude": exc}
    ),
    st.lists(
        st.tuples(st.integers(1, 6), st.integers(0, 8)).map(list), max_size=3
    ),
    st.lists(st.integers(0, 30), max_size=4),
    st.lists(st.integers(0, 30), max_size=4),
)


@given(small_descriptors, small_descriptors)
def test_algebra_matches_pointwise_semantics(a, b):
    limit = 4 * a.period * b.period + max(a.threshold, b.threshold) + 8
    au = set(brute_members(a, limit))
    bu = set(brute_members(b, limit))
    assert set(brute_members(a.union(b), limit)) == au | bu
    assert set(brute_members(a.intersection(b), limit)) == au & bu
    assert set(brute_members(a.difference(b), limit)) == au - bu


@given(small_descriptors)
def test_canonical_form_is_stable(a):
    rebuilt = SetDescriptor.make(a.threshold, a.period, a.residues, a.prefix)
    assert rebuilt == a
    assert SetDescriptor.from_json(a.to_json()) == a
