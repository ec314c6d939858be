"""Eventually periodic subsets of the naturals.

A :class:`SetDescriptor` canonically represents any finite union of
arithmetic progressions and explicit finite sets: membership of ``n`` is
read off a residue table once ``n`` passes a threshold, and from an
explicit prefix below it.  The class is closed under union, intersection,
complement, and difference, and has an exactly computable natural density,
which is what makes ideal membership decidable downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator

from .errors import SchemaError

__all__ = ["SetDescriptor", "empty_set", "finite_set", "full_set", "progression", "tails"]


@dataclass(frozen=True)
class SetDescriptor:
    """Canonical eventually periodic set.

    ``n >= threshold`` is a member iff ``n % period`` is in ``residues``;
    members below the threshold are listed in ``prefix``.
    """

    threshold: int
    period: int
    residues: frozenset
    prefix: frozenset

    @staticmethod
    def make(threshold: int, period: int, residues: Iterable[int], prefix: Iterable[int]) -> "SetDescriptor":
        if period < 1:
            raise SchemaError(f"period must be >= 1, got {period}")
        if threshold < 0:
            raise SchemaError(f"threshold must be >= 0, got {threshold}")
        residues = frozenset(r % period for r in residues)
        prefix = frozenset(p for p in prefix if 0 <= p < threshold)

        # shrink the period to the smallest divisor consistent with residues
        for div in range(1, period + 1):
            if period % div:
                continue
            projected = {r % div for r in residues}
            if frozenset(r for r in range(period) if r % div in projected) == residues:
                period = div
                residues = frozenset(projected)
                break

        # lower the threshold while the prefix agrees with the residue rule
        prefix = set(prefix)
        while threshold > 0:
            n = threshold - 1
            if (n in prefix) != ((n % period) in residues):
                break
            prefix.discard(n)
            threshold = n
        return SetDescriptor(threshold, period, frozenset(residues), frozenset(prefix))

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n < self.threshold:
            return n in self.prefix
        return (n % self.period) in self.residues

    @property
    def is_finite(self) -> bool:
        return not self.residues

    @property
    def is_empty(self) -> bool:
        return not self.residues and not self.prefix

    def density(self) -> Fraction:
        return Fraction(len(self.residues), self.period)

    def _lifted(self, period: int, threshold: int):
        residues = frozenset(r for r in range(period) if (r % self.period) in self.residues)
        prefix = frozenset(n for n in range(threshold) if n in self)
        return residues, prefix

    def _combine(self, other: "SetDescriptor", op) -> "SetDescriptor":
        period = lcm(self.period, other.period)
        threshold = max(self.threshold, other.threshold)
        res_a, pre_a = self._lifted(period, threshold)
        res_b, pre_b = other._lifted(period, threshold)
        return SetDescriptor.make(threshold, period, op(res_a, res_b), op(pre_a, pre_b))

    def union(self, other: "SetDescriptor") -> "SetDescriptor":
        return self._combine(other, frozenset.union)

    def intersection(self, other: "SetDescriptor") -> "SetDescriptor":
        return self._combine(other, frozenset.intersection)

    def difference(self, other: "SetDescriptor") -> "SetDescriptor":
        return self._combine(other, frozenset.difference)

    def complement(self) -> "SetDescriptor":
        return SetDescriptor.make(
            self.threshold,
            self.period,
            frozenset(range(self.period)) - self.residues,
            frozenset(range(self.threshold)) - self.prefix,
        )

    def restrict_min(self, n0: int) -> "SetDescriptor":
        """Members >= n0 only."""
        return self.intersection(tails(n0))

    def count_below(self, limit: int) -> int:
        """Exact number of members in [0, limit)."""
        if limit <= 0:
            return 0
        count = sum(1 for p in self.prefix if p < limit)
        if limit <= self.threshold:
            return count
        for r in self.residues:
            first = self.threshold + ((r - self.threshold) % self.period)
            if first < limit:
                count += (limit - 1 - first) // self.period + 1
        return count

    def members_below(self, limit: int) -> list:
        return [n for n in range(limit) if n in self]

    def iter_members(self) -> Iterator[int]:
        n = 0
        while True:
            if n in self:
                yield n
            n += 1

    def first_member(self):
        for p in sorted(self.prefix):
            return p
        if self.residues:
            return min(
                self.threshold + ((r - self.threshold) % self.period)
                for r in self.residues
            )
        return None

    def to_json(self) -> dict:
        progressions = sorted(
            [self.period, self.threshold + ((r - self.threshold) % self.period)]
            for r in self.residues
        )
        return {
            "progressions": progressions,
            "include": sorted(self.prefix),
            "exclude": [],
        }

    @staticmethod
    def from_json(obj) -> "SetDescriptor":
        if not isinstance(obj, dict):
            raise SchemaError(f"set descriptor must be an object, got {type(obj).__name__}")
        unknown = set(obj) - {"progressions", "include", "exclude"}
        if unknown:
            raise SchemaError(f"unknown set descriptor fields: {sorted(unknown)}")
        out = empty_set()
        for prog in obj.get("progressions", []):
            if (not isinstance(prog, (list, tuple))) or len(prog) != 2:
                raise SchemaError(f"progression must be a pair [step, start], got {prog!r}")
            a, b = prog
            out = out.union(progression(int(a), int(b)))
        include = obj.get("include", [])
        exclude = obj.get("exclude", [])
        if include:
            out = out.union(finite_set(int(n) for n in include))
        if exclude:
            out = out.difference(finite_set(int(n) for n in exclude))
        return out

    def describe(self) -> str:
        if self.is_empty:
            return "{}"
        parts = []
        if self.prefix:
            parts.append("{" + ",".join(str(p) for p in sorted(self.prefix)) + "}")
        for r in sorted(self.residues):
            first = self.threshold + ((r - self.threshold) % self.period)
            parts.append(f"{self.period}w+{first}" if self.period > 1 else f"[{first},inf)")
        return " u ".join(parts)


def empty_set() -> SetDescriptor:
    return SetDescriptor.make(0, 1, (), ())


def full_set() -> SetDescriptor:
    return SetDescriptor.make(0, 1, (0,), ())


def finite_set(members: Iterable[int]) -> SetDescriptor:
    members = sorted(set(int(m) for m in members))
    if any(m < 0 for m in members):
        raise SchemaError("set members must be nonnegative")
    threshold = members[-1] + 1 if members else 0
    return SetDescriptor.make(threshold, 1, (), members)


def progression(step: int, start: int) -> SetDescriptor:
    """The set {start, start+step, start+2*step, ...}."""
    if step < 1:
        raise SchemaError(f"progression step must be >= 1, got {step}")
    if start < 0:
        raise SchemaError(f"progression start must be >= 0, got {start}")
    return SetDescriptor.make(start, step, (start % step,), ())


def tails(t: int) -> SetDescriptor:
    """The set {t, t+1, t+2, ...}."""
    return progression(1, max(0, t))
