from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from summa.errors import SchemaError
from summa.scalars import (
    Interval,
    certainly_le,
    certainly_lt,
    lower,
    parse_scalar,
    scalar_max,
    simplest_between,
    sqrt_enclosure,
    upper,
)

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=64)


def test_parse_rational_strings():
    assert parse_scalar("3/4") == F(3, 4)
    assert parse_scalar("-2") == F(-2)
    assert parse_scalar(5) == F(5)


def test_parse_sqrt_requires_interval_mode():
    with pytest.raises(SchemaError):
        parse_scalar("sqrt:1/2", mode="exact")
    v = parse_scalar("sqrt:1/2", mode="interval")
    assert isinstance(v, Interval)
    assert v.lo * v.lo <= F(1, 2) <= v.hi * v.hi


def test_parse_sqrt_perfect_square_is_exact():
    assert parse_scalar("sqrt:9/4", mode="exact") == F(3, 2)
    assert parse_scalar("-sqrt:4", mode="interval") == F(-2)


def test_interval_arithmetic_contains_truth():
    a = Interval(F(1, 3), F(1, 2))
    b = Interval(F(-1), F(2))
    s = a + b
    assert s.lo == F(1, 3) - 1 and s.hi == F(1, 2) + 2
    p = a * b
    assert p.lo == -F(1, 2) and p.hi == 1
    assert abs(Interval(F(-3), F(1))) == Interval(0, 3)
    assert (a - a).lo <= 0 <= (a - a).hi


def test_interval_division_excludes_zero():
    with pytest.raises(ZeroDivisionError):
        Interval(F(1), F(2)) / Interval(F(-1), F(1))
    q = Interval(F(1), F(2)) / 2
    assert (q.lo, q.hi) == (F(1, 2), F(1))


@given(rationals, rationals, rationals, rationals)
def test_interval_mul_encloses_products(a, b, c, d):
    x = Interval(min(a, b), max(a, b))
    y = Interval(min(c, d), max(c, d))
    prod = x * y
    for u in (x.lo, x.hi):
        for v in (y.lo, y.hi):
            assert prod.lo <= u * v <= prod.hi


def test_certified_comparisons():
    small = Interval(F(0), F(1, 4))
    big = Interval(F(1, 2), F(3, 4))
    assert certainly_lt(small, big)
    assert not certainly_lt(big, small)
    assert certainly_le(F(1, 4), small.hi)


def test_widening_precision_preserves_certified_comparisons():
    # once certified at low precision, higher precision cannot undo it
    comparisons = [(F(1, 2), 1), (F(2), 2), (F(3), 2), (F(17, 16), 2)]
    for q, bound in comparisons:
        coarse = sqrt_enclosure(q, prec_bits=12)
        fine = sqrt_enclosure(q, prec_bits=96)
        if certainly_lt(coarse, F(bound)):
            assert certainly_lt(fine, F(bound))
        assert lower(fine) >= lower(coarse)
        assert upper(fine) <= upper(coarse)


def test_scalar_max_mixed():
    assert scalar_max([F(1), F(3), F(2)]) == F(3)
    m = scalar_max([Interval(F(0), F(2)), F(1)])
    assert (lower(m), upper(m)) == (F(1), F(2))


def test_simplest_between_picks_small_denominators():
    assert simplest_between(F(45, 100), F(55, 100)) == F(1, 2)
    assert simplest_between(F(-1, 10), F(1, 10)) == 0
    assert simplest_between(F(7, 3), F(7, 3)) == F(7, 3)
    assert simplest_between(F(31, 16), F(33, 16)) == 2


@given(rationals, rationals)
def test_simplest_between_lands_inside(a, b):
    lo, hi = min(a, b), max(a, b)
    v = simplest_between(lo, hi)
    assert lo <= v <= hi
