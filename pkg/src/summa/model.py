"""Core data model: operator entries, lazy infinite matrices, sequences.

Matrices are generators ``(n, k) -> OperatorEntry`` together with a tail
model that certifies how rows decay, which is what makes row evaluation,
group norms, and domain checks computable with certified truncation error.
Aggregates (row sums, absolute row sums, sums over descriptor sets) are
cached per matrix and may be overridden by closed forms for the built-in
kinds; the generic path stays available and is cross-checked in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import (
    DimensionMismatch,
    InvalidTailModel,
    NotInDomain,
    SchemaError,
)
from .scalars import Interval, Scalar, lower, upper
from .sets import SetDescriptor

__all__ = [
    "AggregateHooks",
    "BandedTail",
    "EventuallyConstant",
    "FiniteSupportTail",
    "FormulaTail",
    "GeometricTail",
    "MatrixFamily",
    "NoCertificateTail",
    "OperatorEntry",
    "OperatorMatrix",
    "PeriodicTail",
    "VectorSequence",
    "entry_norm",
    "alternating_cesaro_matrix",
    "banded_matrix",
    "cesaro_matrix",
    "delayed_cesaro_matrix",
    "dense_prefix_matrix",
    "euler_matrix",
    "geometric_rows_matrix",
    "identity_matrix",
    "ones_lower_matrix",
    "ones_matrix",
    "oscillating_rows_matrix",
    "unit_shift_matrix",
    "zero_matrix",
    "constant_sequence",
    "eventually_constant_sequence",
    "formula_sequence",
    "indicator_sequence",
    "periodic_sequence",
]


# ---------------------------------------------------------------------------
# entries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorEntry:
    """An m-by-d real block acting from R^d to R^m (1-norms on both sides)."""

    grid: tuple  # m rows, each a tuple of d scalars

    @property
    def rows(self) -> int:
        return len(self.grid)

    @property
    def cols(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    @staticmethod
    def of(rows: Sequence[Sequence]) -> "OperatorEntry":
        grid = tuple(tuple(v if isinstance(v, Interval) else Fraction(v) for v in row) for row in rows)
        if not grid or not grid[0]:
            raise DimensionMismatch("operator entry must be at least 1x1")
        if len({len(r) for r in grid}) != 1:
            raise DimensionMismatch("operator entry rows have unequal lengths")
        return OperatorEntry(grid)

    @staticmethod
    def scalar(value) -> "OperatorEntry":
        return OperatorEntry.of([[value]])

    @staticmethod
    def zeros(m: int, d: int) -> "OperatorEntry":
        return OperatorEntry(tuple((Fraction(0),) * d for _ in range(m)))

    @staticmethod
    def identity(d: int, scale=Fraction(1)) -> "OperatorEntry":
        return OperatorEntry(
            tuple(
                tuple(scale if i == j else Fraction(0) for j in range(d))
                for i in range(d)
            )
        )

    def component(self, i: int, j: int) -> Scalar:
        return self.grid[i][j]

    def norm(self) -> Scalar:
        """Operator norm for 1-norms: max over columns of the column abs sum."""
        best = Fraction(0)
        for j in range(self.cols):
            col = Fraction(0)
            for i in range(self.rows):
                col = col + abs(self.grid[i][j])
            if upper(col) > upper(best) or (
                upper(col) == upper(best) and lower(col) > lower(best)
            ):
                best = col
        return best

    def abs_sum(self) -> Scalar:
        out = Fraction(0)
        for row in self.grid:
            for v in row:
                out = out + abs(v)
        return out

    def apply(self, x: Sequence) -> tuple:
        if len(x) != self.cols:
            raise DimensionMismatch(
                f"entry expects dimension {self.cols}, got {len(x)}"
            )
        return tuple(
            sum((self.grid[i][j] * x[j] for j in range(self.cols)), Fraction(0))
            for i in range(self.rows)
        )

    def add(self, other: "OperatorEntry") -> "OperatorEntry":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("entry shapes differ")
        return OperatorEntry(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.grid, other.grid)
            )
        )

    def scale(self, factor) -> "OperatorEntry":
        return OperatorEntry(tuple(tuple(factor * v for v in row) for row in self.grid))

    def is_zero(self) -> bool:
        return all(lower(v) == 0 == upper(v) for row in self.grid for v in row)


def entry_norm(entry: OperatorEntry) -> Scalar:
    """max_j sum_i |a(i, j)|; equals |a| for 1x1 entries."""
    return entry.norm()


# ---------------------------------------------------------------------------
# tail models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSupportTail:
    """Row n has no nonzero entries at or beyond end_of(n)."""

    kind = "finite-support"
    end: object  # int (constant) or "row" (support [0, n]) or callable n -> int

    def end_of(self, n: int) -> int:
        if self.end == "row":
            return n + 1
        if callable(self.end):
            return self.end(n)
        return int(self.end)

    def support_end(self, n: int) -> Optional[int]:
        return self.end_of(n)

    def tail_norm_bound(self, n: int, K: int) -> Optional[Fraction]:
        return Fraction(0) if K >= self.end_of(n) else None

    def uniform_row_norm_bound(self) -> Optional[Fraction]:
        return None


@dataclass(frozen=True)
class BandedTail:
    """Nonzero entries only for k in [n - below, n + above]."""

    below: int
    above: int
    kind = "banded"

    def __post_init__(self):
        if self.below < 0 or self.above < 0:
            raise InvalidTailModel("band offsets must be nonnegative")

    def support_end(self, n: int) -> Optional[int]:
        return n + self.above + 1

    def support_start(self, n: int) -> int:
        return max(0, n - self.below)

    def tail_norm_bound(self, n: int, K: int) -> Optional[Fraction]:
        return Fraction(0) if K >= self.support_end(n) else None

    def uniform_row_norm_bound(self) -> Optional[Fraction]:
        return None


@dataclass(frozen=True)
class GeometricTail:
    """Certifies entry norms: ||A_{n,k}|| <= coef * ratio**k for every n."""

    coef: Fraction
    ratio: Fraction
    kind = "geometric"

    def __post_init__(self):
        if self.coef < 0:
            raise InvalidTailModel(f"geometric coefficient must be >= 0, got {self.coef}")
        if not (0 <= self.ratio < 1):
            raise InvalidTailModel(f"geometric ratio must be in [0, 1), got {self.ratio}")

    def support_end(self, n: int) -> Optional[int]:
        return None

    def tail_norm_bound(self, n: int, K: int) -> Fraction:
        # sum_{k >= K} coef * ratio^k
        return self.coef * self.ratio**K / (1 - self.ratio)

    def uniform_row_norm_bound(self) -> Optional[Fraction]:
        return self.tail_norm_bound(0, 0)


@dataclass(frozen=True)
class NoCertificateTail:
    """No decay certificate; evaluation against infinite sets is refused."""

    kind = "none"

    def support_end(self, n: int) -> Optional[int]:
        return None

    def tail_norm_bound(self, n: int, K: int) -> Optional[Fraction]:
        return None

    def uniform_row_norm_bound(self) -> Optional[Fraction]:
        return None


# ---------------------------------------------------------------------------
# lazy operator matrices
# ---------------------------------------------------------------------------


class AggregateHooks:
    """Closed-form overrides for row aggregates; None falls back to the
    generic entrywise path."""

    def row_component_sum(self, A, n, i, j):
        return None

    def row_component_abs(self, A, n, i, j):
        return None

    def set_component_sum(self, A, n, E, i, j):
        return None

    def set_component_abs(self, A, n, E, i, j):
        return None

    def row_norm(self, A, n):
        return None

    def row_mass(self, A, n):
        return None


class OperatorMatrix:
    """Lazily evaluated infinite matrix of operator entries.

    Immutable after construction; the entry generator must be a pure
    function of (n, k).  ``row_norm_bound``, when given, certifies
    sum_k ||A_{n,k}|| <= bound for every n.
    """

    def __init__(
        self,
        label: str,
        d: int,
        m: int,
        entry_fn: Callable[[int, int], OperatorEntry],
        tail,
        row_norm_bound: Optional[Fraction] = None,
        kind: str = "custom",
        params: Optional[dict] = None,
        hooks: Optional[AggregateHooks] = None,
        nonnegative: bool = False,
    ):
        if d < 1 or m < 1:
            raise DimensionMismatch(f"dimensions must be >= 1, got d={d}, m={m}")
        self.label = label
        self.d = d
        self.m = m
        self._entry_fn = entry_fn
        self.tail = tail
        self.row_norm_bound = None if row_norm_bound is None else Fraction(row_norm_bound)
        self.kind = kind
        self.params = dict(params or {})
        self.hooks = hooks
        self.nonnegative = nonnegative
        self._cache: dict = {}

    def __repr__(self):
        return f"OperatorMatrix({self.label!r}, kind={self.kind!r}, d={self.d}, m={self.m})"

    def entry(self, n: int, k: int) -> OperatorEntry:
        if n < 0 or k < 0:
            raise IndexError(f"matrix indices must be nonnegative, got ({n}, {k})")
        e = self._entry_fn(n, k)
        return e

    def support_end(self, n: int) -> Optional[int]:
        return self.tail.support_end(n)

    def support_start(self, n: int) -> int:
        return self.tail.support_start(n) if isinstance(self.tail, BandedTail) else 0

    def row_entries(self, n: int, k_end: Optional[int] = None):
        """(k, entry) pairs over the certified support, capped at k_end."""
        end = self.support_end(n)
        if end is None:
            if k_end is None:
                raise NotInDomain(
                    f"matrix {self.label!r} row {n} has no certified finite support"
                )
            end = k_end
        elif k_end is not None:
            end = min(end, k_end)
        for k in range(self.support_start(n), end):
            e = self.entry(n, k)
            if not e.is_zero():
                yield k, e

    # -- truncation -------------------------------------------------------

    def truncation_index(self, n: int, tol: Fraction) -> int:
        """Least K with certified tail bound sum_{k>=K} ||A_{n,k}|| <= tol."""
        end = self.support_end(n)
        if end is not None:
            return end
        bound = self.tail.tail_norm_bound(n, 0)
        if bound is None:
            raise NotInDomain(
                f"matrix {self.label!r} row {n} has no certified tail bound"
            )
        K = 0
        while self.tail.tail_norm_bound(n, K) > tol:
            K += 1
        return K

    # -- cached aggregates --------------------------------------------------

    def _cached(self, key, compute):
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    def _sum_entries(self, n, E, tol, term, nonneg: bool):
        """Generic truncated sum of term(entry) over k (optionally k in E)."""
        end = self.support_end(n)
        err = Fraction(0)
        if end is None:
            bound = self.tail.tail_norm_bound(n, 0)
            if bound is None:
                raise NotInDomain(
                    f"matrix {self.label!r} row {n}: uncertified tail in aggregate"
                )
            end = self.truncation_index(n, tol)
            err = self.tail.tail_norm_bound(n, end)
        ks = range(self.support_start(n), end) if E is None else E.members_below(end)
        total = Fraction(0)
        for k in ks:
            total = total + term(self.entry(n, k))
        if err == 0:
            return total
        if nonneg:
            return Interval(lower(total), upper(total) + err)
        return Interval(lower(total) - err, upper(total) + err)

    def row_component_sum(self, n: int, i: int, j: int, tol: Fraction) -> Scalar:
        def compute():
            if self.hooks:
                v = self.hooks.row_component_sum(self, n, i, j)
                if v is not None:
                    return v
            return self._sum_entries(n, None, tol, lambda e: e.component(i, j), False)

        return self._cached(("rcs", n, i, j, tol), compute)

    def row_component_abs(self, n: int, i: int, j: int, tol: Fraction) -> Scalar:
        def compute():
            if self.hooks:
                v = self.hooks.row_component_abs(self, n, i, j)
                if v is not None:
                    return v
            return self._sum_entries(n, None, tol, lambda e: abs(e.component(i, j)), True)

        return self._cached(("rca", n, i, j, tol), compute)

    def set_component_sum(self, n: int, E: SetDescriptor, i: int, j: int, tol: Fraction) -> Scalar:
        def compute():
            if self.hooks:
                v = self.hooks.set_component_sum(self, n, E, i, j)
                if v is not None:
                    return v
            return self._sum_entries(n, E, tol, lambda e: e.component(i, j), False)

        return self._cached(("scs", n, E, i, j, tol), compute)

    def set_component_abs(self, n: int, E: SetDescriptor, i: int, j: int, tol: Fraction) -> Scalar:
        def compute():
            if self.hooks:
                v = self.hooks.set_component_abs(self, n, E, i, j)
                if v is not None:
                    return v
            return self._sum_entries(n, E, tol, lambda e: abs(e.component(i, j)), True)

        return self._cached(("sca", n, E, i, j, tol), compute)

    def row_norm(self, n: int, tol: Fraction) -> Scalar:
        def compute():
            if self.hooks:
                v = self.hooks.row_norm(self, n)
                if v is not None:
                    return v
            return self._sum_entries(n, None, tol, lambda e: e.norm(), True)

        return self._cached(("rn", n, tol), compute)

    def set_norm(self, n: int, E: SetDescriptor, tol: Fraction) -> Scalar:
        return self._cached(
            ("sn", n, E, tol),
            lambda: self._sum_entries(n, E, tol, lambda e: e.norm(), True),
        )

    def row_mass(self, n: int, tol: Fraction) -> Scalar:
        """sum_k sum_{i,j} |a_{n,k}(i,j)| with certified truncation."""

        def compute():
            if self.hooks:
                v = self.hooks.row_mass(self, n)
                if v is not None:
                    return v
            end = self.support_end(n)
            if end is not None:
                return self._sum_entries(n, None, tol, lambda e: e.abs_sum(), True)
            # entrywise mass is at most d times the entry norm
            scaled_tol = Fraction(tol, self.d)
            end = self.truncation_index(n, scaled_tol)
            err = self.tail.tail_norm_bound(n, end) * self.d
            total = Fraction(0)
            for k in range(end):
                total = total + self.entry(n, k).abs_sum()
            if err == 0:
                return total
            return Interval(lower(total), upper(total) + err)

        return self._cached(("rm", n, tol), compute)

    # -- validation ---------------------------------------------------------

    def validate(self, rows: int = 8, cols: int = 32) -> None:
        """Spot-check tail and bound declarations on a sample of entries."""
        for n in range(rows):
            end = self.support_end(n)
            if end is not None:
                for k in range(end, end + 4):
                    if not self.entry(n, k).is_zero():
                        raise InvalidTailModel(
                            f"matrix {self.label!r}: nonzero entry at ({n}, {k}) "
                            f"beyond declared support {end}"
                        )
            if isinstance(self.tail, BandedTail):
                start = self.tail.support_start(n)
                for k in range(max(0, start - 4), start):
                    if not self.entry(n, k).is_zero():
                        raise InvalidTailModel(
                            f"matrix {self.label!r}: nonzero entry at ({n}, {k}) "
                            f"below the declared band"
                        )
            if isinstance(self.tail, GeometricTail):
                for k in range(cols):
                    bound = self.tail.coef * self.tail.ratio**k
                    if upper(self.entry(n, k).norm()) > bound:
                        raise InvalidTailModel(
                            f"matrix {self.label!r}: entry norm at ({n}, {k}) "
                            f"exceeds the geometric bound {bound}"
                        )
            if self.row_norm_bound is not None and end is not None:
                total = Fraction(0)
                for _, e in self.row_entries(n):
                    total = total + e.norm()
                if upper(total) > self.row_norm_bound:
                    raise InvalidTailModel(
                        f"matrix {self.label!r}: row {n} norm {total} exceeds "
                        f"declared bound {self.row_norm_bound}"
                    )


@dataclass(frozen=True)
class MatrixFamily:
    """Finite, ordered family of operator matrices sharing dimensions."""

    members: tuple

    def __post_init__(self):
        if not self.members:
            raise SchemaError("matrix family must be nonempty")
        d, m = self.members[0].d, self.members[0].m
        labels = set()
        for A in self.members:
            if (A.d, A.m) != (d, m):
                raise DimensionMismatch(
                    f"family members disagree on dimensions: {A.label!r}"
                )
            if A.label in labels:
                raise SchemaError(f"duplicate member label {A.label!r}")
            labels.add(A.label)

    @staticmethod
    def of(*members) -> "MatrixFamily":
        return MatrixFamily(tuple(members))

    @property
    def kappa(self) -> int:
        return len(self.members)

    @property
    def d(self) -> int:
        return self.members[0].d

    @property
    def m(self) -> int:
        return self.members[0].m

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


# ---------------------------------------------------------------------------
# vector sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EventuallyConstant:
    value: tuple
    from_index: int
    kind = "eventually-constant"


@dataclass(frozen=True)
class PeriodicTail:
    block: tuple  # tuple of vectors; x_k = block[k % len] for k >= from_index
    from_index: int
    kind = "periodic"


@dataclass(frozen=True)
class FormulaTail:
    kind = "formula"


class VectorSequence:
    """Lazily evaluated bounded sequence in R^d with a declared tail."""

    def __init__(
        self,
        label: str,
        dim: int,
        term_fn: Callable[[int], tuple],
        tail,
        bound: Optional[Fraction] = None,
        kind: str = "custom",
        params: Optional[dict] = None,
    ):
        if dim < 1:
            raise DimensionMismatch(f"sequence dimension must be >= 1, got {dim}")
        self.label = label
        self.dim = dim
        self._term_fn = term_fn
        self.tail = tail
        self.kind = kind
        self.params = dict(params or {})
        if bound is None:
            bound = self._derive_bound()
        self.bound = Fraction(bound)
        self._validate()

    def __repr__(self):
        return f"VectorSequence({self.label!r}, kind={self.kind!r}, d={self.dim})"

    def term(self, k: int) -> tuple:
        v = tuple(self._term_fn(k))
        if len(v) != self.dim:
            raise DimensionMismatch(
                f"sequence {self.label!r} term {k} has dimension {len(v)}"
            )
        return v

    def _norm(self, vec) -> Fraction:
        return sum((abs(upper(c)) if upper(c) > -lower(c) else abs(lower(c)) for c in vec), Fraction(0))

    def _derive_bound(self) -> Fraction:
        if isinstance(self.tail, (EventuallyConstant, PeriodicTail)):
            prefix_end = self.tail.from_index
            candidates = [self._norm(self.term(k)) for k in range(prefix_end)]
            if isinstance(self.tail, EventuallyConstant):
                candidates.append(self._norm(self.tail.value))
            else:
                candidates.extend(self._norm(b) for b in self.tail.block)
            return max(candidates) if candidates else Fraction(0)
        raise SchemaError(
            f"sequence {self.label!r}: a formula tail needs an explicit bound"
        )

    def _validate(self, sample: int = 48) -> None:
        for k in range(sample):
            vec = self.term(k)
            if self._norm(vec) > self.bound:
                raise SchemaError(
                    f"sequence {self.label!r}: term {k} exceeds declared bound {self.bound}"
                )
            if isinstance(self.tail, EventuallyConstant) and k >= self.tail.from_index:
                if tuple(vec) != tuple(self.tail.value):
                    raise SchemaError(
                        f"sequence {self.label!r}: term {k} contradicts the "
                        f"eventually constant tail"
                    )
            if isinstance(self.tail, PeriodicTail) and k >= self.tail.from_index:
                expected = self.tail.block[k % len(self.tail.block)]
                if tuple(vec) != tuple(expected):
                    raise SchemaError(
                        f"sequence {self.label!r}: term {k} contradicts the periodic tail"
                    )


# ---------------------------------------------------------------------------
# built-in matrix kinds
# ---------------------------------------------------------------------------


class _CesaroHooks(AggregateHooks):
    def __init__(self, scale: Fraction, dim: int, delay: int = 0):
        self.scale = scale
        self.dim = dim
        self.delay = delay

    def _zero_row(self, n):
        return n < self.delay

    def row_component_sum(self, A, n, i, j):
        if self._zero_row(n):
            return Fraction(0)
        return self.scale if i == j else Fraction(0)

    def row_component_abs(self, A, n, i, j):
        if self._zero_row(n):
            return Fraction(0)
        return abs(self.scale) if i == j else Fraction(0)

    def set_component_sum(self, A, n, E, i, j):
        if self._zero_row(n):
            return Fraction(0)
        if i != j:
            return Fraction(0)
        return self.scale * Fraction(E.count_below(n + 1), n + 1)

    def set_component_abs(self, A, n, E, i, j):
        v = self.set_component_sum(A, n, E, i, j)
        return None if v is None else abs(v)

    def row_norm(self, A, n):
        return Fraction(0) if self._zero_row(n) else abs(self.scale)

    def row_mass(self, A, n):
        return Fraction(0) if self._zero_row(n) else abs(self.scale) * self.dim


def cesaro_matrix(scale=Fraction(1), dim: int = 1, label: Optional[str] = None) -> OperatorMatrix:
    """Averaging matrix: entries scale * I / (n+1) at columns k <= n."""
    scale = Fraction(scale)
    if label is None:
        label = "cesaro" if scale == 1 and dim == 1 else f"cesaro[{scale};d={dim}]"

    def entry(n, k):
        if k <= n:
            return OperatorEntry.identity(dim, scale / (n + 1))
        return OperatorEntry.zeros(dim, dim)

    return OperatorMatrix(
        label,
        dim,
        dim,
        entry,
        FiniteSupportTail("row"),
        row_norm_bound=abs(scale),
        kind="cesaro",
        params={"scale": scale, "dim": dim},
        hooks=_CesaroHooks(scale, dim),
        nonnegative=scale >= 0,
    )


def delayed_cesaro_matrix(delay: int, label: Optional[str] = None) -> OperatorMatrix:
    """Averaging matrix whose first ``delay`` rows are zero."""
    if label is None:
        label = f"cesaro-delay{delay}"

    def entry(n, k):
        if n >= delay and k <= n:
            return OperatorEntry.scalar(Fraction(1, n + 1))
        return OperatorEntry.zeros(1, 1)

    return OperatorMatrix(
        label,
        1,
        1,
        entry,
        FiniteSupportTail("row"),
        row_norm_bound=Fraction(1),
        kind="delayed-cesaro",
        params={"delay": delay},
        hooks=_CesaroHooks(Fraction(1), 1, delay=delay),
        nonnegative=True,
    )


class _UnitShiftHooks(AggregateHooks):
    def __init__(self, stride: int, offset: int):
        self.stride = stride
        self.offset = offset

    def _col(self, n):
        return self.stride * n + self.offset

    def row_component_sum(self, A, n, i, j):
        return Fraction(1)

    def row_component_abs(self, A, n, i, j):
        return Fraction(1)

    def set_component_sum(self, A, n, E, i, j):
        return Fraction(1) if self._col(n) in E else Fraction(0)

    set_component_abs = set_component_sum

    def row_norm(self, A, n):
        return Fraction(1)

    def row_mass(self, A, n):
        return Fraction(1)


def unit_shift_matrix(stride: int, offset: int, label: Optional[str] = None) -> OperatorMatrix:
    """Row n carries a single unit mass at column stride*n + offset."""
    if stride < 0 or offset < 0:
        raise SchemaError("unit-shift parameters must be nonnegative")
    if label is None:
        label = f"unit[{stride}n+{offset}]"

    def entry(n, k):
        return OperatorEntry.scalar(1 if k == stride * n + offset else 0)

    return OperatorMatrix(
        label,
        1,
        1,
        entry,
        FiniteSupportTail(lambda n: stride * n + offset + 1),
        row_norm_bound=Fraction(1),
        kind="unit-shift",
        params={"stride": stride, "offset": offset},
        hooks=_UnitShiftHooks(stride, offset),
        nonnegative=True,
    )


def identity_matrix(label: str = "identity") -> OperatorMatrix:
    out = unit_shift_matrix(1, 0, label=label)
    out.kind = "identity"
    out.params = {}
    return out


def zero_matrix(d: int = 1, m: int = 1, label: str = "zero") -> OperatorMatrix:
    class _Hooks(AggregateHooks):
        def row_component_sum(self, A, n, i, j):
            return Fraction(0)

        row_component_abs = row_component_sum

        def set_component_sum(self, A, n, E, i, j):
            return Fraction(0)

        set_component_abs = set_component_sum

        def row_norm(self, A, n):
            return Fraction(0)

        def row_mass(self, A, n):
            return Fraction(0)

    return OperatorMatrix(
        label,
        d,
        m,
        lambda n, k: OperatorEntry.zeros(m, d),
        FiniteSupportTail(0),
        row_norm_bound=Fraction(0),
        kind="zero",
        params={"d": d, "m": m},
        hooks=_Hooks(),
        nonnegative=True,
    )


class _EulerHooks(AggregateHooks):
    def row_component_sum(self, A, n, i, j):
        return Fraction(1)

    row_component_abs = row_component_sum

    def row_norm(self, A, n):
        return Fraction(1)

    def row_mass(self, A, n):
        return Fraction(1)


def euler_matrix(label: str = "euler") -> OperatorMatrix:
    """Euler mean: a_{n,k} = C(n, k) / 2^n for k <= n."""

    def entry(n, k):
        if k <= n:
            return OperatorEntry.scalar(Fraction(math.comb(n, k), 2**n))
        return OperatorEntry.zeros(1, 1)

    return OperatorMatrix(
        label,
        1,
        1,
        entry,
        FiniteSupportTail("row"),
        row_norm_bound=Fraction(1),
        kind="euler",
        params={},
        hooks=_EulerHooks(),
        nonnegative=True,
    )


def ones_lower_matrix(label: str = "ones-lower") -> OperatorMatrix:
    """a_{n,k} = 1 for k <= n; row norms grow like n + 1."""

    def entry(n, k):
        return OperatorEntry.scalar(1 if k <= n else 0)

    return OperatorMatrix(
        label,
        1,
        1,
        entry,
        FiniteSupportTail("row"),
        kind="ones-lower",
        params={},
        nonnegative=True,
    )


def alternating_cesaro_matrix(label: str = "alternating-cesaro") -> OperatorMatrix:
    """a_{n,k} = (-1)^k / (n+1) for k <= n."""

    def entry(n, k):
        if k <= n:
            sign = 1 if k % 2 == 0 else -1
            return OperatorEntry.scalar(Fraction(sign, n + 1))
        return OperatorEntry.zeros(1, 1)

    return OperatorMatrix(
        label,
        1,
        1,
        entry,
        FiniteSupportTail("row"),
        row_norm_bound=Fraction(1),
        kind="alternating-cesaro",
        params={},
    )


def geometric_rows_matrix(
    coef=Fraction(1, 2), ratio=Fraction(1, 2), label: Optional[str] = None
) -> OperatorMatrix:
    """Row-constant geometric entries a_{n,k} = coef * ratio^k."""
    coef, ratio = Fraction(coef), Fraction(ratio)
    if label is None:
        label = f"geometric[{coef};{ratio}]"
    tail = GeometricTail(abs(coef), ratio)

    def entry(n, k):
        return OperatorEntry.scalar(coef * ratio**k)

    return OperatorMatrix(
        label,
        1,
        1,
        entry,
        tail,
        row_norm_bound=tail.uniform_row_norm_bound(),
        kind="geometric",
        params={"coef": coef, "ratio": ratio},
        nonnegative=coef >= 0,
    )


def ones_matrix(label: str = "ones") -> OperatorMatrix:
    """a_{n,k} = 1 for all k: rows are divergent series against bounded input."""
    return OperatorMatrix(
        label,
        1,
        1,
        lambda n, k: OperatorEntry.scalar(1),
        NoCertificateTail(),
        kind="ones",
        params={},
        nonnegative=True,
    )


def oscillating_rows_matrix(label: str = "oscillating") -> OperatorMatrix:
    """a_{n,k} = (-1)^k / (k+1), declared without any tail certificate."""

    def entry(n, k):
        sign = 1 if k % 2 == 0 else -1
        return OperatorEntry.scalar(Fraction(sign, k + 1))

    return OperatorMatrix(label, 1, 1, entry, NoCertificateTail(), kind="oscillating", params={})


def banded_matrix(
    below: int,
    above: int,
    period: int,
    entries: dict,
    label: str = "banded",
) -> OperatorMatrix:
    """Band matrix with periodic entries keyed by (n mod period, offset).

    ``entries`` maps (residue, offset) to a scalar with -below <= offset <= above;
    any key outside the band is rejected.
    """
    if period < 1:
        raise SchemaError(f"banded period must be >= 1, got {period}")
    table = {}
    for key, value in entries.items():
        res, off = key
        if not (-below <= off <= above):
            raise InvalidTailModel(
                f"banded matrix {label!r}: entry at offset {off} lies outside "
                f"the declared band [-{below}, {above}]"
            )
        table[(res % period, off)] = value if isinstance(value, Interval) else Fraction(value)

    def entry(n, k):
        return OperatorEntry.scalar(table.get((n % period, k - n), Fraction(0)))

    bound = Fraction(0)
    for res in range(period):
        row = sum(
            (abs(upper(v)) for (r, _), v in table.items() if r == res),
            Fraction(0),
        )
        bound = max(bound, row)
    return OperatorMatrix(
        label,
        1,
        1,
        entry,
        BandedTail(below, above),
        row_norm_bound=bound,
        kind="banded",
        params={"below": below, "above": above, "period": period, "entries": dict(table)},
    )


def dense_prefix_matrix(
    block: Sequence[Sequence], tail, label: str = "dense-prefix"
) -> OperatorMatrix:
    """Explicit block for n < rows, k < cols; zero elsewhere."""
    rows = [tuple(v if isinstance(v, Interval) else Fraction(v) for v in row) for row in block]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    if any(len(r) != n_cols for r in rows):
        raise SchemaError(f"dense-prefix matrix {label!r}: ragged block")

    def entry(n, k):
        if n < n_rows and k < n_cols:
            return OperatorEntry.scalar(rows[n][k])
        return OperatorEntry.zeros(1, 1)

    out = OperatorMatrix(
        label,
        1,
        1,
        entry,
        tail,
        kind="dense-prefix",
        params={"rows": n_rows, "cols": n_cols},
    )
    out.validate(rows=min(n_rows + 2, 8))
    return out


# ---------------------------------------------------------------------------
# built-in sequence kinds
# ---------------------------------------------------------------------------


def _as_vector(value, dim) -> tuple:
    if isinstance(value, (list, tuple)):
        if len(value) != dim:
            raise DimensionMismatch(f"vector literal {value!r} has wrong dimension")
        return tuple(v if isinstance(v, Interval) else Fraction(v) for v in value)
    if dim != 1:
        raise DimensionMismatch(f"scalar literal {value!r} for dimension {dim}")
    return (value if isinstance(value, Interval) else Fraction(value),)


def periodic_sequence(block, dim: int = 1, label: Optional[str] = None) -> VectorSequence:
    vecs = tuple(_as_vector(v, dim) for v in block)
    if not vecs:
        raise SchemaError("periodic block must be nonempty")
    if label is None:
        label = "periodic[" + ",".join("|".join(str(c) for c in v) for v in vecs) + "]"
    return VectorSequence(
        label,
        dim,
        lambda k: vecs[k % len(vecs)],
        PeriodicTail(vecs, 0),
        kind="periodic",
        params={"block": vecs},
    )


def constant_sequence(value, dim: int = 1, label: Optional[str] = None) -> VectorSequence:
    vec = _as_vector(value, dim)
    if label is None:
        label = f"const[{'|'.join(str(c) for c in vec)}]"
    return VectorSequence(
        label,
        dim,
        lambda k: vec,
        EventuallyConstant(vec, 0),
        kind="constant",
        params={"value": vec},
    )


def eventually_constant_sequence(
    prefix, value, dim: int = 1, label: Optional[str] = None
) -> VectorSequence:
    pre = tuple(_as_vector(v, dim) for v in prefix)
    vec = _as_vector(value, dim)
    if label is None:
        label = f"eventually[{'|'.join(str(c) for c in vec)}@{len(pre)}]"

    def term(k):
        return pre[k] if k < len(pre) else vec

    return VectorSequence(
        label,
        dim,
        term,
        EventuallyConstant(vec, len(pre)),
        kind="eventually-constant",
        params={"prefix": pre, "value": vec},
    )


def indicator_sequence(descriptor: SetDescriptor, label: Optional[str] = None) -> VectorSequence:
    """x_n = 1 when n is in the set, else 0; tail follows the set's period."""
    if label is None:
        label = f"indicator[{descriptor.describe()}]"
    # for k >= threshold membership depends on k % period only
    aligned = tuple(
        (Fraction(1 if r in descriptor.residues else 0),)
        for r in range(descriptor.period)
    )

    def term(k):
        return (Fraction(1 if k in descriptor else 0),)

    return VectorSequence(
        label,
        1,
        term,
        PeriodicTail(aligned, descriptor.threshold),
        kind="indicator",
        params={"set": descriptor},
    )


def formula_sequence(
    term_fn: Callable[[int], tuple],
    bound,
    dim: int = 1,
    label: str = "formula",
    kind: str = "formula",
) -> VectorSequence:
    return VectorSequence(
        label, dim, term_fn, FormulaTail(), bound=Fraction(bound), kind=kind
    )
