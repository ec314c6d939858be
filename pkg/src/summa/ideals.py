"""Ideals on the naturals: membership, limits, cluster points, and cores.

An ideal models "small" index sets.  Three computable kinds are supported:

* ``fin`` -- the finite sets, with the tail sets as dual-filter base;
* ``density-zero`` -- sets of natural density zero (on the eventually
  periodic descriptor class this coincides with the finite sets, but
  non-membership is certified through an exact positive density);
* ``countably-generated`` -- an explicit decreasing dual-filter base of
  infinite descriptor sets, normalized so the t-th base set misses [0, t).

Limit verdicts are horizon-scoped and three-valued.  The engine never
certifies a verdict it cannot re-derive: holds come with a witnessing
dual-base index or an exceptional set inside the ideal, failures carry a
concrete re-evaluable witness, everything else is reported as unknown.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import HorizonTooSmall, PreconditionError, SchemaError
from .scalars import (
    Interval,
    Scalar,
    lower,
    midpoint,
    simplest_between,
    upper,
)
from .sets import SetDescriptor, finite_set, tails

__all__ = [
    "ClusterReport",
    "HorizonParams",
    "IdealLimit",
    "IdealSpec",
    "LimitDecision",
    "SeqView",
    "TailInfo",
    "Trilean",
    "Verdict",
    "cluster_points",
    "core",
    "decide_scalar_limit",
    "detect_tail",
    "ideal_contains",
    "ideal_liminf",
    "ideal_limsup",
    "ideal_lim",
    "ideal_subset_certified",
    "view_of",
    "window_view",
]


class Trilean(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "FailsWithWitness"
    UNKNOWN = "UnknownAtHorizon"


@dataclass(frozen=True)
class HorizonParams:
    """Evaluation horizon: index bound N, tolerance eps, dual-base depth."""

    N: int = 64
    eps: Fraction = Fraction(1, 16)
    tmax: Optional[int] = None

    def __post_init__(self):
        if self.N < 1:
            raise SchemaError(f"horizon N must be >= 1, got {self.N}")
        if self.eps <= 0:
            raise SchemaError(f"eps must be > 0, got {self.eps}")
        if self.tmax is not None and self.tmax < 0:
            raise SchemaError(f"tmax must be >= 0, got {self.tmax}")

    @property
    def probe_depth(self) -> int:
        d = self.tmax if self.tmax is not None else self.N // 2
        return min(d, self.N - 1)


@dataclass(frozen=True)
class IdealSpec:
    """Computable ideal on the naturals."""

    label: str
    kind: str  # "fin" | "density-zero" | "countably-generated"
    base: tuple = ()
    base_complete: bool = True

    @staticmethod
    def fin(label: str = "fin") -> "IdealSpec":
        return IdealSpec(label=label, kind="fin")

    @staticmethod
    def density_zero(label: str = "density-zero") -> "IdealSpec":
        return IdealSpec(label=label, kind="density-zero")

    @staticmethod
    def countably_generated(
        base: Sequence[SetDescriptor], label: str, complete: bool = True
    ) -> "IdealSpec":
        """Build from a dual-filter base, normalizing it to be decreasing
        with min S_t >= t; every base set must stay infinite."""
        if not base:
            raise SchemaError("countably generated ideal needs a nonempty dual base")
        normalized = []
        current = None
        for t, raw in enumerate(base):
            current = raw if current is None else current.intersection(raw)
            current = current.restrict_min(t)
            if current.is_finite:
                raise SchemaError(
                    f"dual base set at index {t} is finite; the ideal would contain omega"
                )
            normalized.append(current)
        return IdealSpec(
            label=label,
            kind="countably-generated",
            base=tuple(normalized),
            base_complete=complete,
        )

    @property
    def has_dual_base(self) -> bool:
        return self.kind != "density-zero"

    def dual_set(self, t: int) -> SetDescriptor:
        if self.kind == "fin":
            return tails(t)
        if self.kind == "countably-generated":
            if t < len(self.base):
                return self.base[t]
            return self.base[-1].restrict_min(t)
        raise PreconditionError(f"ideal {self.label!r} ({self.kind}) has no dual base")

    def probe_sets(self, h: HorizonParams) -> list:
        """Dual-filter sets probed at this horizon.

        The density-zero ideal has no countable base; Fin tails are used
        instead, which is sound because Fin is contained in every ideal.
        """
        depth = h.probe_depth
        if self.kind == "density-zero":
            return [tails(t) for t in range(depth + 1)]
        if self.kind == "countably-generated":
            ts = list(range(min(len(self.base), depth + 1)))
            if not ts:
                ts = [0]
            return [self.dual_set(t) for t in ts]
        return [tails(t) for t in range(depth + 1)]


def ideal_contains(ideal: IdealSpec, E: SetDescriptor, h: HorizonParams) -> Trilean:
    """Certified three-valued membership of a descriptor set in an ideal."""
    if ideal.kind == "fin":
        return Trilean.YES if E.is_finite else Trilean.NO
    if ideal.kind == "density-zero":
        return Trilean.YES if E.density() == 0 and E.is_finite else Trilean.NO
    # countably generated: E is small iff it meets some base set finitely;
    # the base is decreasing, so the deepest set decides.
    deepest = min(len(ideal.base) - 1, h.probe_depth) if not ideal.base_complete else len(ideal.base) - 1
    for t in range(deepest + 1):
        if E.intersection(ideal.dual_set(t)).is_finite:
            return Trilean.YES
    if ideal.base_complete:
        return Trilean.NO
    return Trilean.UNKNOWN


def ideal_subset_certified(small: IdealSpec, big: IdealSpec, h: HorizonParams) -> bool:
    """True when small <= big can be certified on generators."""
    if small.kind == "fin":
        return True
    if small.kind == big.kind == "density-zero":
        return True
    if small.kind == "countably-generated":
        return all(
            ideal_contains(big, s.complement(), h) == Trilean.YES for s in small.base
        )
    return False


# ---------------------------------------------------------------------------
# sequence views: a finite materialized window plus tail knowledge
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailInfo:
    """Eventually periodic structure: value at n >= start is
    block[(n - start) % period]."""

    start: int
    period: int
    block: tuple
    certified: bool

    def level_descriptor(self, positions) -> SetDescriptor:
        """Index set {n >= start} hitting the given block positions."""
        out = None
        for i in positions:
            prog = SetDescriptor.make(
                self.start + i, self.period, ((self.start + i) % self.period,), ()
            )
            out = prog if out is None else out.union(prog)
        return out if out is not None else finite_set(())


@dataclass(frozen=True)
class SeqView:
    """Finite view of an infinite sequence of vectors."""

    dim: int
    values: tuple  # vectors (tuples of Scalar), indices 0..len-1
    bound: Fraction
    tail: Optional[TailInfo]
    declared_formula: bool = False

    def __len__(self):
        return len(self.values)

    def scalar(self, n: int) -> Scalar:
        if self.dim != 1:
            raise PreconditionError("scalar access on a vector sequence")
        return self.values[n][0]


def _vec_eq(a, b) -> bool:
    return tuple(a) == tuple(b)


def detect_tail(values: Sequence, max_period: Optional[int] = None) -> Optional[TailInfo]:
    """Look for eventual periodicity in a window of vectors.

    Detection requires the pattern to cover at least half the window and
    at least two full periods; the result is marked uncertified.
    """
    n = len(values)
    if n < 4:
        return None
    if max_period is None:
        max_period = max(1, n // 4)
    for p in range(1, max_period + 1):
        # walk back from the end; a mismatch near the tail exits immediately
        i = n - p - 1
        while i >= 0 and values[i] == values[i + p]:
            i -= 1
        start = i + 1
        if start <= n // 2 and n - start >= 2 * p:
            block = tuple(values[start + i] for i in range(p))
            return TailInfo(start=start, period=p, block=block, certified=False)
    return None


def view_of(x, N: int) -> SeqView:
    """Materialize a declared vector sequence on [0, N)."""
    values = tuple(x.term(k) for k in range(N))
    kind = x.tail.kind
    if kind == "eventually-constant":
        tail = TailInfo(
            start=x.tail.from_index, period=1, block=(x.tail.value,), certified=True
        )
        return SeqView(x.dim, values, x.bound, tail)
    if kind == "periodic":
        p = len(x.tail.block)
        start = x.tail.from_index
        block = tuple(x.tail.block[(start + i) % p] for i in range(p))
        tail = TailInfo(start=start, period=p, block=block, certified=True)
        return SeqView(x.dim, values, x.bound, tail)
    return SeqView(x.dim, values, x.bound, detect_tail(values), declared_formula=True)


def window_view(values: Sequence, dim: int, bound: Fraction) -> SeqView:
    """View over computed values (e.g. transform output); tail is detected."""
    values = tuple(tuple(v) for v in values)
    return SeqView(dim, values, Fraction(bound), detect_tail(values))


# ---------------------------------------------------------------------------
# scalar limit decisions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitDecision:
    verdict: Verdict
    margin: Fraction
    certificate_t: Optional[int] = None
    exception_set: Optional[SetDescriptor] = None
    witness_n: Optional[int] = None
    witness_value: Optional[Scalar] = None
    exact: bool = False


def _max_dev(devs, indices) -> Fraction:
    return max((upper(devs[n]) for n in indices), default=Fraction(0))


def decide_scalar_limit(
    devs: Sequence[Scalar], ideal: IdealSpec, h: HorizonParams
) -> LimitDecision:
    """Decide whether a deviation window certifies an ideal limit of zero.

    Holds when the deviations drop to eps along some probed dual-filter set
    (or when their exceedance pattern is certified inside the ideal); fails
    when exceedance persists through every probed set and is either
    structurally infinite outside the ideal or fills the deepest window
    without a downward trend.
    """
    N = len(devs)
    eps = h.eps
    sure_ok = [upper(devs[n]) <= eps for n in range(N)]
    sure_exceed = [lower(devs[n]) > eps for n in range(N)]

    probe = ideal.probe_sets(h)
    windows = []
    for t, S in enumerate(probe):
        idx = [n for n in range(N) if n in S]
        if idx:
            windows.append((t, idx))

    for t, idx in windows:
        if all(sure_ok[n] for n in idx):
            m = _max_dev(devs, idx)
            return LimitDecision(
                verdict=Verdict.HOLDS, margin=m, certificate_t=t, exact=(m == 0)
            )

    # structure-based certification of the exceedance set
    detected = detect_tail([(d,) for d in devs])
    if detected is not None:
        bad_positions = [
            i for i, v in enumerate(detected.block) if lower(v[0]) > eps
        ]
        good_positions = [
            i for i, v in enumerate(detected.block) if upper(v[0]) <= eps
        ]
        if len(bad_positions) + len(good_positions) == detected.period:
            if bad_positions:
                exceed_set = detected.level_descriptor(bad_positions)
                membership = ideal_contains(ideal, exceed_set, h)
                wit = max(n for n in range(N) if n in exceed_set)
                if membership == Trilean.NO:
                    return LimitDecision(
                        verdict=Verdict.FAILS,
                        margin=upper(devs[wit]),
                        witness_n=wit,
                        witness_value=devs[wit],
                        exact=(detected.period == 1),
                    )
                if membership == Trilean.YES:
                    ok_idx = [
                        n
                        for n in range(detected.start, N)
                        if n not in exceed_set and sure_ok[n]
                    ]
                    complement_ok = all(
                        sure_ok[n]
                        for n in range(detected.start, N)
                        if n not in exceed_set
                    )
                    if complement_ok:
                        m = _max_dev(devs, ok_idx)
                        return LimitDecision(
                            verdict=Verdict.HOLDS,
                            margin=m,
                            exception_set=exceed_set,
                            exact=(m == 0),
                        )

    # persistent unexplained exceedance on the deepest window
    if windows:
        t_star, deep = windows[-1]
        if all(sure_exceed[n] for n in deep):
            half = len(deep) // 2
            m1 = _max_dev(devs, deep[:half]) if half else Fraction(0)
            m2 = _max_dev(devs, deep[half:])
            # only material progress towards eps blocks the failure verdict;
            # deviations settling above eps are a certified-at-horizon miss
            trending_down = half > 0 and m2 < m1 - (m1 - eps) / 4
            if not trending_down:
                wit = deep[-1]
                return LimitDecision(
                    verdict=Verdict.FAILS,
                    margin=upper(devs[wit]),
                    witness_n=wit,
                    witness_value=devs[wit],
                )

    wit = next((n for n in range(N - 1, -1, -1) if sure_exceed[n]), None)
    return LimitDecision(
        verdict=Verdict.UNKNOWN,
        margin=_max_dev(devs, range(N)),
        witness_n=wit,
        witness_value=None if wit is None else devs[wit],
    )


# ---------------------------------------------------------------------------
# ideal limits of vector sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IdealLimit:
    status: str  # "converges" | "diverges" | "unknown"
    value: Optional[tuple] = None
    certified: bool = False
    certificate_t: Optional[int] = None
    exception_set: Optional[SetDescriptor] = None
    separators: Optional[tuple] = None
    witness_n: Optional[int] = None

    @property
    def converges(self) -> bool:
        return self.status == "converges"


def _norm1(vec) -> Scalar:
    out = Fraction(0)
    for c in vec:
        out = out + abs(c)
    return out


def _dev_window(view: SeqView, eta) -> list:
    return [_norm1(tuple(c - e for c, e in zip(view.values[n], eta))) for n in range(len(view))]


def _certificate_for(view: SeqView, eta, ideal: IdealSpec, h: HorizonParams):
    devs = _dev_window(view, eta)
    for t, S in enumerate(ideal.probe_sets(h)):
        idx = [n for n in range(len(view)) if n in S]
        if idx and all(upper(devs[n]) <= h.eps for n in idx):
            return t
    return None


def _tail_values_exact(tail: TailInfo) -> bool:
    return all(
        all(isinstance(c, (int, Fraction)) for c in vec) for vec in tail.block
    )


def _distinct_tail_values(tail: TailInfo):
    """Distinct block vectors with the block positions where they occur."""
    groups = []
    for i, vec in enumerate(tail.block):
        for value, positions in groups:
            if _vec_eq(value, vec):
                positions.append(i)
                break
        else:
            groups.append((tuple(Fraction(c) for c in vec), [i]))
    return groups


def _limit_from_tail(view: SeqView, ideal: IdealSpec, h: HorizonParams) -> Optional[IdealLimit]:
    tail = view.tail
    if tail is None or not _tail_values_exact(tail):
        return None
    groups = _distinct_tail_values(tail)
    memberships = []
    for value, positions in groups:
        others = [i for i in range(tail.period) if i not in positions]
        exceptional = tail.level_descriptor(others) if others else finite_set(())
        memberships.append((value, positions, ideal_contains(ideal, exceptional, h), exceptional))

    for value, positions, member, exceptional in memberships:
        if member == Trilean.YES:
            t = _certificate_for(view, value, ideal, h)
            return IdealLimit(
                status="converges",
                value=value,
                certified=tail.certified,
                certificate_t=t,
                exception_set=exceptional,
            )
    # divergent: need two values whose own level sets are not small
    fat = [
        (value, positions)
        for value, positions, _, _ in memberships
        if ideal_contains(ideal, tail.level_descriptor(positions), h) == Trilean.NO
    ]
    if len(fat) >= 2:
        return IdealLimit(
            status="diverges",
            certified=tail.certified,
            separators=(fat[0][0], fat[1][0]),
        )
    return IdealLimit(status="unknown")


def _limit_unstructured(view: SeqView, ideal: IdealSpec, h: HorizonParams) -> IdealLimit:
    N = len(view)
    window = range(max(0, 3 * N // 4), N)
    eta = []
    for c in range(view.dim):
        his = [upper(view.values[n][c]) for n in window]
        los = [lower(view.values[n][c]) for n in window]
        lo_bound = max(his) - h.eps
        hi_bound = min(los) + h.eps
        if lo_bound > hi_bound:
            eta = None
            break
        eta.append(simplest_between(lo_bound, hi_bound))
    if eta is not None:
        decision = decide_scalar_limit(_dev_window(view, eta), ideal, h)
        if decision.verdict == Verdict.HOLDS:
            return IdealLimit(
                status="converges",
                value=tuple(eta),
                certified=False,
                certificate_t=decision.certificate_t,
                exception_set=decision.exception_set,
            )
        if decision.verdict == Verdict.FAILS:
            return IdealLimit(
                status="diverges", certified=False, witness_n=decision.witness_n
            )
        return IdealLimit(status="unknown")
    if view.dim == 1:
        clusters = cluster_points(view, ideal, h)
        seps = clusters.separated_pair(h.eps)
        if seps is not None:
            return IdealLimit(status="diverges", certified=False, separators=seps)
    return IdealLimit(status="unknown")


def ideal_lim(x_or_view, ideal: IdealSpec, h: HorizonParams) -> IdealLimit:
    """Ideal limit of a bounded sequence at the given horizon.

    Sequences with periodic or eventually constant tails get exact
    verdicts; windows without structure are decided within eps, and a
    declared formula tail that stays undecidable raises
    :class:`HorizonTooSmall`.
    """
    view = x_or_view if isinstance(x_or_view, SeqView) else view_of(x_or_view, h.N)
    from_tail = _limit_from_tail(view, ideal, h)
    if from_tail is not None and from_tail.status != "unknown":
        return from_tail
    result = _limit_unstructured(view, ideal, h)
    if result.status == "unknown" and view.declared_formula:
        raise HorizonTooSmall(
            f"horizon N={h.N} cannot certify convergence or divergence"
        )
    return result


# ---------------------------------------------------------------------------
# cluster points, limsup/liminf, cores (scalar sequences)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterReport:
    exact: bool
    certified: bool
    values: Optional[tuple]
    intervals: tuple

    def max_upper(self) -> Fraction:
        if self.exact:
            return max(self.values)
        return max(hi for _, hi in self.intervals)

    def min_lower(self) -> Fraction:
        if self.exact:
            return min(self.values)
        return min(lo for lo, _ in self.intervals)

    def separated_pair(self, eps: Fraction):
        """Two cluster values at distance > 2*eps, if present."""
        if self.exact:
            if len(self.values) >= 2 and self.values[-1] - self.values[0] > 2 * eps:
                return (self.values[0], self.values[-1])
            return None
        if not self.intervals:
            return None
        lo_cell = min(self.intervals)
        hi_cell = max(self.intervals)
        if lo_cell[1] + 2 * eps < hi_cell[0]:
            return (midpoint(Interval(*lo_cell)), midpoint(Interval(*hi_cell)))
        return None


def cluster_points(x_or_view, ideal: IdealSpec, h: HorizonParams) -> ClusterReport:
    """Cluster points of a bounded scalar sequence under an ideal.

    Periodic and eventually constant tails yield the exact finite cluster
    set; otherwise an eps-grid over [-bound, bound] is refined by bisection
    and the surviving cells (hit inside every probed dual-filter set) are
    returned as closed intervals of width <= eps.
    """
    view = x_or_view if isinstance(x_or_view, SeqView) else view_of(x_or_view, h.N)
    if view.dim != 1:
        raise PreconditionError("cluster points are defined for scalar sequences")

    tail = view.tail
    if tail is not None and _tail_values_exact(tail):
        groups = _distinct_tail_values(tail)
        memberships = [
            (value[0], ideal_contains(ideal, tail.level_descriptor(positions), h))
            for value, positions in groups
        ]
        if all(m != Trilean.UNKNOWN for _, m in memberships):
            values = tuple(sorted(v for v, m in memberships if m == Trilean.NO))
            return ClusterReport(
                exact=True,
                certified=tail.certified,
                values=values,
                intervals=tuple((v, v) for v in values),
            )

    N = len(view)
    # probe sets decrease with t, so a cell hit inside the deepest window
    # is hit inside every probed dual-filter set
    deepest = []
    for S in ideal.probe_sets(h):
        idx = [n for n in range(N) if n in S]
        if idx:
            deepest = idx

    def persistent(lo, hi):
        return any(
            lower(view.values[n][0]) <= hi and upper(view.values[n][0]) >= lo
            for n in deepest
        )

    bound = view.bound
    stack = [(-bound, bound)] if persistent(-bound, bound) else []
    leaves = []
    while stack:
        lo, hi = stack.pop()
        if hi - lo <= h.eps:
            leaves.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        for cell in ((lo, mid), (mid, hi)):
            if persistent(*cell):
                stack.append(cell)
    leaves.sort()
    return ClusterReport(exact=False, certified=False, values=None, intervals=tuple(leaves))


def ideal_limsup(x_or_view, ideal: IdealSpec, h: HorizonParams) -> Fraction:
    report = cluster_points(x_or_view, ideal, h)
    if report.exact and not report.values:
        raise HorizonTooSmall("no certified cluster point at this horizon")
    if not report.exact and not report.intervals:
        raise HorizonTooSmall("no certified cluster point at this horizon")
    return report.max_upper()


def ideal_liminf(x_or_view, ideal: IdealSpec, h: HorizonParams) -> Fraction:
    report = cluster_points(x_or_view, ideal, h)
    if report.exact and not report.values:
        raise HorizonTooSmall("no certified cluster point at this horizon")
    if not report.exact and not report.intervals:
        raise HorizonTooSmall("no certified cluster point at this horizon")
    return report.min_lower()


def core(x_or_view, ideal: IdealSpec, h: HorizonParams) -> tuple:
    """The interval [liminf, limsup] under the ideal."""
    report = cluster_points(x_or_view, ideal, h)
    return (report.min_lower(), report.max_upper())
