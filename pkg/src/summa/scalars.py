"""Exact scalar arithmetic: rationals plus rational-endpoint enclosures.

Exact mode works entirely in ``fractions.Fraction``; no rounding ever
happens.  Interval mode admits irrational inputs (square roots) as closed
enclosures ``[lo, hi]`` with Fraction endpoints.  Every arithmetic result
on intervals encloses the true real value, so any comparison certified
through :func:`certainly_le` and friends stays true when endpoints are
computed at higher precision.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Union

from .errors import SchemaError

__all__ = [
    "Fraction",
    "Interval",
    "Scalar",
    "as_fraction",
    "certainly_eq",
    "certainly_le",
    "certainly_lt",
    "format_scalar",
    "lower",
    "midpoint",
    "parse_scalar",
    "scalar_max",
    "scalar_to_json",
    "simplest_between",
    "sqrt_enclosure",
    "upper",
    "width",
]


class Interval:
    """Closed interval with rational endpoints, used as a certified enclosure."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = Fraction(lo)
        hi = Fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other):
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        if isinstance(other, (int, Fraction)):
            return self.lo == other and self.hi == other
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    @staticmethod
    def _coerce(other):
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            v = Fraction(other)
            return Interval(v, v)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("division by interval containing zero")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0, max(-self.lo, self.hi))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Interval(1, 1)
        for _ in range(n):
            out = out * self
        return out


Scalar = Union[Fraction, Interval]


def lower(s) -> Fraction:
    return s.lo if isinstance(s, Interval) else Fraction(s)


def upper(s) -> Fraction:
    return s.hi if isinstance(s, Interval) else Fraction(s)


def width(s) -> Fraction:
    return upper(s) - lower(s)


def midpoint(s) -> Fraction:
    return (lower(s) + upper(s)) / 2


def certainly_le(a, b) -> bool:
    return upper(a) <= lower(b)


def certainly_lt(a, b) -> bool:
    return upper(a) < lower(b)


def certainly_eq(a, b) -> bool:
    return width(a) == 0 and width(b) == 0 and lower(a) == lower(b)


def scalar_max(values: Iterable) -> Scalar:
    """Tight enclosure of the maximum of finitely many scalars."""
    values = list(values)
    if not values:
        raise ValueError("scalar_max of empty collection")
    lo = max(lower(v) for v in values)
    hi = max(upper(v) for v in values)
    return Fraction(lo) if lo == hi else Interval(lo, hi)


def as_fraction(value) -> Fraction:
    """Parse an exact rational from ints, Fractions, or 'p/q' strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SchemaError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not a rational: {value!r}") from exc
    raise SchemaError(f"not a rational: {value!r}")


def _is_perfect_square(n: int) -> bool:
    r = isqrt(n)
    return r * r == n


def sqrt_enclosure(q: Fraction, prec_bits: int = 64) -> Scalar:
    """Certified enclosure of sqrt(q); exact when q is a perfect square."""
    q = Fraction(q)
    if q < 0:
        raise SchemaError(f"square root of negative rational {q}")
    if _is_perfect_square(q.numerator) and _is_perfect_square(q.denominator):
        return Fraction(isqrt(q.numerator), isqrt(q.denominator))
    scale = 1 << prec_bits
    n = isqrt(q.numerator * scale * scale // q.denominator)
    while Fraction(n * n, scale * scale) > q:
        n -= 1
    while Fraction((n + 1) * (n + 1), scale * scale) < q:
        n += 1
    return Interval(Fraction(n, scale), Fraction(n + 1, scale))


def parse_scalar(value, mode: str = "exact", prec_bits: int = 64) -> Scalar:
    """Parse a scalar literal.

    Accepts rationals (ints, 'p/q' strings) in every mode; 'sqrt:p/q' and
    '-sqrt:p/q' literals require interval mode unless the radicand is a
    perfect square.
    """
    if isinstance(value, str):
        text = value.strip()
        neg = False
        if text.startswith("-sqrt:"):
            neg, text = True, text[1:]
        if text.startswith("sqrt:"):
            radicand = as_fraction(text[len("sqrt:"):])
            enclosure = sqrt_enclosure(radicand, prec_bits)
            if isinstance(enclosure, Interval) and mode != "interval":
                raise SchemaError(
                    f"irrational literal {value!r} requires interval mode"
                )
            return -enclosure if neg else enclosure
    return as_fraction(value)


def format_scalar(s) -> str:
    if isinstance(s, Interval):
        return f"[{s.lo};{s.hi}]"
    return str(Fraction(s))


def scalar_to_json(s):
    if isinstance(s, Interval):
        return {"lo": str(s.lo), "hi": str(s.hi)}
    return str(Fraction(s))


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator inside [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    # 0 < lo <= hi: walk the continued fraction of the shared prefix.
    p0, q0, p1, q1 = 1, 0, 0, 1  # accumulated Moebius transform
    while True:
        fl = lo.numerator // lo.denominator
        if lo == fl or fl + 1 <= hi:
            # an integer (or the left endpoint itself) fits
            n = fl if lo == fl else fl + 1
            return Fraction(p0 * n + p1, q0 * n + q1)
        p0, p1 = p0 * fl + p1, p0
        q0, q1 = q0 * fl + q1, q0
        lo, hi = 1 / (hi - fl), 1 / (lo - fl)
