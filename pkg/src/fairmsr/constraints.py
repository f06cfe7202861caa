"""Color tables and checkers for mergeable clustering constraints.

Every ratio predicate is decided by integer cross-multiplication on
``fractions.Fraction`` parameters, so fairness is exact.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .geometry import UsageError


class Kind(str, enum.Enum):
    UNCONSTRAINED = "none"
    LOWER_BOUND = "lower-bound"
    OUTLIERS = "outliers"
    EXACT_FAIRNESS = "exact-fairness"
    MIN_BALANCE = "min-balance"
    EXACT_BALANCE = "exact-balance"
    RANGE_BALANCE = "range-balance"


COLOR_KINDS = frozenset({Kind.EXACT_FAIRNESS, Kind.MIN_BALANCE, Kind.EXACT_BALANCE,
                         Kind.RANGE_BALANCE})


@dataclass(frozen=True)
class ColorTable:
    """Dense color ids ``0..num_colors-1``, one per point index."""

    color_of: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "color_of", tuple(int(c) for c in self.color_of))
        h = self.num_colors
        for c in self.color_of:
            if not 0 <= c < h:
                raise UsageError(f"color id {c} outside 0..{h - 1}")

    @classmethod
    def from_labels(cls, labels: Sequence) -> "ColorTable":
        """Intern arbitrary labels in first-appearance order."""
        ids: dict = {}
        out = []
        for lab in labels:
            out.append(ids.setdefault(lab, len(ids)))
        return cls(tuple(out), tuple(str(x) for x in ids))

    @property
    def num_colors(self) -> int:
        if self.labels:
            return len(self.labels)
        return max(self.color_of) + 1 if self.color_of else 0

    def __len__(self) -> int:
        return len(self.color_of)

    def counts(self, cluster: Iterable[int]) -> list[int]:
        cnt = [0] * self.num_colors
        for i in cluster:
            cnt[self.color_of[i]] += 1
        return cnt

    def replicate(self, m: int) -> "ColorTable":
        return ColorTable(tuple(c for c in self.color_of for _ in range(m)), self.labels)


@dataclass(frozen=True)
class ConstraintSpec:
    kind: Kind = Kind.UNCONSTRAINED
    lower: int = 0
    outliers: int = 0
    balance: Fraction = Fraction(0)
    alpha: tuple[Fraction, ...] = field(default=())
    beta: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        k = self.kind
        if k is Kind.LOWER_BOUND and self.lower < 1:
            raise UsageError("lower bound l must be a positive integer")
        if k is Kind.OUTLIERS and self.outliers < 0:
            raise UsageError("outlier count z must be nonnegative")
        if k is Kind.MIN_BALANCE and not 0 <= self.balance <= 1:
            raise UsageError("balance b must lie in [0, 1]")
        if k is Kind.RANGE_BALANCE:
            if len(self.alpha) != len(self.beta) or not self.alpha:
                raise UsageError("range balance needs one (alpha, beta) pair per color")
            for a, b in zip(self.alpha, self.beta):
                if not 0 <= a <= b <= 1:
                    raise UsageError(f"need 0 <= alpha <= beta <= 1, got ({a}, {b})")

    # constructors mirroring the CLI grammar
    @classmethod
    def unconstrained(cls):
        return cls()

    @classmethod
    def lower_bound(cls, l: int):
        return cls(Kind.LOWER_BOUND, lower=int(l))

    @classmethod
    def with_outliers(cls, z: int):
        return cls(Kind.OUTLIERS, outliers=int(z))

    @classmethod
    def exact_fairness(cls):
        return cls(Kind.EXACT_FAIRNESS)

    @classmethod
    def min_balance(cls, b):
        return cls(Kind.MIN_BALANCE, balance=Fraction(str(b)) if isinstance(b, float) else Fraction(b))

    @classmethod
    def exact_balance(cls):
        return cls(Kind.EXACT_BALANCE)

    @classmethod
    def range_balance(cls, alpha: Sequence, beta: Sequence):
        conv = (lambda v: Fraction(str(v)) if isinstance(v, float) else Fraction(v))
        return cls(Kind.RANGE_BALANCE, alpha=tuple(map(conv, alpha)),
                   beta=tuple(map(conv, beta)))

    @property
    def needs_colors(self) -> bool:
        return self.kind in COLOR_KINDS

    def describe(self) -> str:
        k = self.kind
        if k is Kind.LOWER_BOUND:
            return f"lower-bound:{self.lower}"
        if k is Kind.OUTLIERS:
            return f"outliers:{self.outliers}"
        if k is Kind.MIN_BALANCE:
            return f"min-balance:{self.balance}"
        if k is Kind.RANGE_BALANCE:
            pairs = ";".join(f"{a}/{b}" for a, b in zip(self.alpha, self.beta))
            return f"range-balance:{pairs}"
        return k.value


def parse_constraint(text: str, range_table: Mapping[int, tuple] | None = None) -> ConstraintSpec:
    """Parse ``none | lower-bound:<l> | outliers:<z> | exact-fairness |
    min-balance:<b> | exact-balance | range-balance:<path>``.

    For ``range-balance`` the caller loads the table file and passes it as
    ``range_table`` (color id -> (alpha, beta)).
    """
    name, _, arg = text.strip().partition(":")
    name = name.strip().lower()
    try:
        if name == "none":
            return ConstraintSpec.unconstrained()
        if name == "lower-bound":
            return ConstraintSpec.lower_bound(int(arg))
        if name == "outliers":
            return ConstraintSpec.with_outliers(int(arg))
        if name == "exact-fairness":
            return ConstraintSpec.exact_fairness()
        if name == "min-balance":
            return ConstraintSpec.min_balance(Fraction(arg.strip()))
        if name == "exact-balance":
            return ConstraintSpec.exact_balance()
        if name == "range-balance":
            if range_table is None:
                raise UsageError("range-balance needs a table file")
            ids = sorted(range_table)
            if ids != list(range(len(ids))):
                raise UsageError("range-balance table must list every color exactly once")
            return ConstraintSpec.range_balance([range_table[i][0] for i in ids],
                                                [range_table[i][1] for i in ids])
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad constraint argument in {text!r}: {exc}") from None
    raise UsageError(f"unknown constraint {text!r}")


def validate_colors(colors: ColorTable | None, spec: ConstraintSpec, n: int) -> None:
    if not spec.needs_colors:
        return
    if colors is None:
        raise UsageError(f"constraint {spec.kind.value} needs a color per point")
    if len(colors) != n:
        raise UsageError(f"{len(colors)} colors for {n} points")
    if spec.kind is Kind.MIN_BALANCE and colors.num_colors != 2:
        raise UsageError("min-balance is defined for exactly two colors")
    if spec.kind is Kind.RANGE_BALANCE and len(spec.alpha) != colors.num_colors:
        raise UsageError("range-balance table must cover every color")


def _cluster_ok(cnt: Sequence[int], size: int, spec: ConstraintSpec,
                total: Sequence[int] | None, n: int) -> bool:
    if size == 0:
        return True
    k = spec.kind
    if k is Kind.LOWER_BOUND:
        return size >= spec.lower
    if k is Kind.EXACT_FAIRNESS:
        return all(c * n == t * size for c, t in zip(cnt, total))
    if k is Kind.MIN_BALANCE:
        lo, hi = min(cnt), max(cnt)
        b = spec.balance
        # min(lo/hi, hi/lo) = lo/hi >= b, and a one-color cluster has balance 0
        return lo * b.denominator >= b.numerator * hi
    if k is Kind.EXACT_BALANCE:
        return len(set(cnt)) <= 1
    if k is Kind.RANGE_BALANCE:
        for c, a, b in zip(cnt, spec.alpha, spec.beta):
            if a.numerator * size > c * a.denominator:
                return False
            if c * b.denominator > b.numerator * size:
                return False
        return True
    return True


def cluster_satisfies(cluster: Iterable[int], colors: ColorTable | None,
                      spec: ConstraintSpec, n: int | None = None) -> bool:
    """Per-cluster predicate of ``spec``; vacuously true on the empty cluster."""
    members = list(cluster)
    if spec.needs_colors and colors is None:
        raise UsageError(f"constraint {spec.kind.value} needs colors")
    if n is None:
        n = len(colors) if colors is not None else 0
    cnt = colors.counts(members) if colors is not None else []
    total = colors.counts(range(len(colors))) if colors is not None else None
    return _cluster_ok(cnt, len(members), spec, total, n)


def satisfies(clustering: Sequence[Iterable[int]], colors: ColorTable | None,
              spec: ConstraintSpec, n: int | None = None) -> bool:
    """True iff the clustering covers the instance (all but at most z points
    under Outliers) and every nonempty cluster meets the predicate.

    ``n`` defaults to the number of colors; without colors the clustering is
    assumed to be over ``0..max_index``.
    """
    clusters = [list(c) for c in clustering]
    if spec.needs_colors and colors is None:
        raise UsageError(f"constraint {spec.kind.value} needs a color per point")
    if n is None:
        if colors is not None:
            n = len(colors)
        else:
            n = 1 + max((i for c in clusters for i in c), default=-1)
    seen: set[int] = set()
    for c in clusters:
        for i in c:
            if not 0 <= i < n:
                raise UsageError(f"point index {i} outside 0..{n - 1}")
            if i in seen:
                raise UsageError(f"point {i} appears in two clusters")
            seen.add(i)
    covered = len(seen)
    if spec.kind is Kind.OUTLIERS:
        return covered >= n - spec.outliers
    if covered != n:
        return False
    if spec.kind in (Kind.UNCONSTRAINED,):
        return True
    total = colors.counts(range(n)) if colors is not None else None
    for c in clusters:
        cnt = colors.counts(c) if colors is not None else []
        if not _cluster_ok(cnt, len(c), spec, total, n):
            return False
    return True


def merged(a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
    """Disjoint union of two clusters."""
    sa, sb = frozenset(a), frozenset(b)
    if sa & sb:
        raise UsageError(f"clusters overlap on {sorted(sa & sb)}")
    return sa | sb


def balance(cluster: Iterable[int], colors: ColorTable) -> Fraction:
    """Two-color balance min(r/b, b/r) of one cluster (0 for a one-color cluster)."""
    cnt = Counter(colors.color_of[i] for i in cluster)
    lo = min(cnt.get(0, 0), cnt.get(1, 0))
    hi = max(cnt.get(0, 0), cnt.get(1, 0))
    return Fraction(lo, hi) if hi else Fraction(0)
