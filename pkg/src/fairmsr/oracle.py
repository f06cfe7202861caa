"""Exact constrained k-min-sum-radii by exhaustive partition enumeration.

Partitions are generated as restricted-growth strings (labels appear in
first-use order), so each unordered partition is visited once. A partial
assignment's summed MEB radii never decrease as points are added, which
gives a sound branch-and-bound cut.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constraints import ColorTable, ConstraintSpec, Kind, satisfies, validate_colors
from .geometry import ResourceError, UsageError, as_points, exact_meb
from .solver.search import env_budget

DEFAULT_BUDGET = 4000  # canonical partitions; admits n <= 12 at k = 2 and n <= 9 at k = 3


@lru_cache(maxsize=None)
def stirling2(n: int, j: int) -> int:
    if n == j:
        return 1
    if j == 0 or j > n:
        return 0
    return j * stirling2(n - 1, j) + stirling2(n - 1, j - 1)


def partition_count(n: int, k: int, z: int = 0) -> int:
    """Canonical partitions of n points into at most k labelled-by-first-use
    blocks, summed over every excluded set of at most z points."""
    return sum(math.comb(n, t) * sum(stirling2(n - t, j) for j in range(0, k + 1)
                                     if j > 0 or n == t)
               for t in range(0, min(z, n) + 1))


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    clusters: tuple     # k tuples, labels in first-use order, empty ones last
    outliers: tuple
    cost: float
    enumerated: int     # complete assignments examined
    pruned: int         # subtrees cut by the cost bound

    def to_dict(self) -> dict:
        return {"feasible": self.feasible, "clusters": [list(c) for c in self.clusters],
                "outliers": list(self.outliers),
                "cost": self.cost if self.feasible else None,
                "enumerated": self.enumerated, "pruned": self.pruned}


def exact_msr(P, k: int, colors: ColorTable | None = None, spec: ConstraintSpec | None = None,
              budget: int | None = None, prune: bool = True) -> OracleResult:
    """Minimum sum of exact MEB radii over all partitions into at most k
    clusters satisfying ``spec`` (and, under Outliers, over every choice of at
    most z excluded points).

    Among optimal partitions the first in restricted-growth order is returned.
    """
    pts = as_points(P)
    spec = spec or ConstraintSpec.unconstrained()
    n = len(pts)
    if n == 0:
        raise UsageError("empty instance")
    if k < 1:
        raise UsageError("k must be positive")
    validate_colors(colors, spec, n)
    z = spec.outliers if spec.kind is Kind.OUTLIERS else 0
    budget = budget if budget is not None else env_budget(DEFAULT_BUDGET)
    total = partition_count(n, k, z)
    if total > budget:
        raise ResourceError(f"oracle needs {total} partitions (budget {budget})")

    meb_cache: dict = {}

    def radius(members: tuple) -> float:
        r = meb_cache.get(members)
        if r is None:
            r = exact_meb(pts[list(members)]).radius
            meb_cache[members] = r
        return r

    labels = [0] * n          # -1 marks an outlier
    blocks: list[list[int]] = []
    best = [math.inf, None, None]
    stats = [0, 0]

    def leaf():
        stats[0] += 1
        clusters = [tuple(b) for b in blocks]
        outl = tuple(i for i in range(n) if labels[i] < 0)
        if not satisfies(clusters, colors, spec, n):
            return
        cost = math.fsum(radius(c) for c in clusters)
        if cost < best[0]:
            best[:] = [cost, clusters, outl]

    def rec(i: int, lb: float, nout: int):
        if prune and lb > best[0] * (1.0 + 1e-12) + 1e-15:
            stats[1] += 1
            return
        if i == n:
            leaf()
            return
        for j in range(min(len(blocks) + 1, k)):
            if j == len(blocks):
                blocks.append([i])
                old = 0.0
            else:
                old = radius(tuple(blocks[j]))
                blocks[j].append(i)
            labels[i] = j
            new = radius(tuple(blocks[j]))
            rec(i + 1, lb - old + new, nout)
            if len(blocks[j]) == 1:
                blocks.pop()
            else:
                blocks[j].pop()
        if nout < z:
            labels[i] = -1
            rec(i + 1, lb, nout + 1)
            labels[i] = 0

    rec(0, 0.0, 0)
    enumerated, pruned = stats
    if best[1] is None:
        return OracleResult(False, (), (), math.inf, enumerated, pruned)
    clusters = tuple(best[1]) + ((),) * (k - len(best[1]))
    return OracleResult(True, clusters, best[2], best[0], enumerated, pruned)


def brute_force_kcenter(P, k: int) -> float:
    """Exact k-center value with centers restricted to input points."""
    pts = as_points(P)
    n = len(pts)
    D = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    best = math.inf
    for C in itertools.combinations(range(n), min(k, n)):
        best = min(best, float(D[:, list(C)].min(axis=1).max()))
    return best
