"""Finite candidate sets for the unknown optimal radii."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .geometry import ResourceError, UsageError, approx_meb, as_points

DEFAULT_SUBSET_BUDGET = 10**7


@dataclass(frozen=True)
class RadiusCandidates:
    values: tuple[float, ...]
    provenance: str

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def covering_value(self, r_star: float, eps: float) -> float | None:
        """Smallest candidate r with r* <= r <= (1+eps) r*, if any."""
        arr = self.as_array()
        i = int(np.searchsorted(arr, r_star, side="left"))
        if i < len(arr) and arr[i] <= (1.0 + eps) * r_star:
            return float(arr[i])
        return None


@functools.lru_cache(maxsize=64)
def _powers(q: float, m: int) -> np.ndarray:
    out = np.power(q, np.arange(m + 1, dtype=float))
    out.setflags(write=False)
    return out


def ceil_log(x: float, q: float) -> int:
    """Smallest m >= 0 with q**m >= x (checked in floating point)."""
    if x <= 1.0:
        return 0
    m = max(0, math.ceil(math.log(x) / math.log(q)))
    while m > 0 and q ** (m - 1) >= x:
        m -= 1
    while q ** m < x:
        m += 1
    return m


def _grid(anchor: float, q: float, m: int) -> tuple[float, ...]:
    return tuple(float(v) for v in anchor * _powers(q, m))


def geometric_grid(a: float, b: float, eps: float, provenance: str = "grid") -> RadiusCandidates:
    """{(1+eps)^i a : i = 0..m} with m the least exponent reaching b."""
    if not a > 0:
        raise UsageError(f"grid anchor must be positive, got {a}")
    if b < a:
        raise UsageError(f"need b >= a, got a={a}, b={b}")
    if not eps > 0:
        raise UsageError(f"eps must be positive, got {eps}")
    q = 1.0 + eps
    return RadiusCandidates(_grid(a, q, _grid_exponent(a, b, q)), provenance)


def _grid_exponent(a: float, b: float, q: float) -> int:
    m = ceil_log(b / a, q)
    while m > 0 and a * q ** (m - 1) >= b:
        m -= 1
    while a * _powers(q, m)[-1] < b:
        m += 1
    return m


def largest_radius_candidates_kcenter(r_alpha: float, alpha: float, beta: float, k: int,
                                      eps: float) -> RadiusCandidates:
    """Grid anchored at r_alpha/alpha with exponents 0..2*ceil(log_{1+eps}(alpha*beta*k)).

    Contains a (1+eps)-overestimate of the largest radius of any
    beta-approximate min-sum-radii covering, given an alpha-approximate
    k-center value r_alpha.
    """
    if not r_alpha > 0 or alpha < 1 or beta < 1 or k < 1 or not eps > 0:
        raise UsageError("need r_alpha > 0, alpha >= 1, beta >= 1, k >= 1, eps > 0")
    q = 1.0 + eps
    m = 2 * ceil_log(alpha * beta * k, q)
    return RadiusCandidates(_grid(r_alpha / alpha, q, m), "kcenter-interval")


def remaining_radii_candidates(r_max: float, k: int, eps: float) -> RadiusCandidates:
    """{(1+eps)^i (eps/k) r_max : i = 0..ceil(log_{1+eps}(k/eps))}."""
    grid = remaining_grid_array(r_max, k, eps)
    return RadiusCandidates(tuple(float(v) for v in grid), "remaining-grid")


def remaining_grid_array(r_max: float, k: int, eps: float) -> np.ndarray:
    """Array form of ``remaining_radii_candidates`` (same values, no tuple copy)."""
    if not r_max > 0 or k < 1 or not 0 < eps < 1:
        raise UsageError("need r_max > 0, k >= 1, 0 < eps < 1")
    a = (eps / k) * r_max
    q = 1.0 + eps
    return a * _powers(q, _grid_exponent(a, r_max, q))


def coreset_size(eps: float) -> int:
    return math.ceil(1.0 / eps) + 1


def count_subsets(n: int, s: int) -> int:
    return sum(math.comb(n, j) for j in range(1, min(s, n) + 1))


def coreset_radius_candidates(P, eps: float,
                              budget: int = DEFAULT_SUBSET_BUDGET) -> RadiusCandidates:
    """Radii r_K and (1+eps) r_K of approximate MEBs of all subsets K with
    |K| <= ceil(1/eps) + 1.

    For every C subset of P the result holds some r with
    cost(C) <= r <= (1+eps) cost(C).
    """
    pts = as_points(P)
    if not 0 < eps < 1:
        raise UsageError(f"eps must lie in (0, 1), got {eps}")
    n = len(pts)
    s = coreset_size(eps)
    total = count_subsets(n, s)
    if total > budget:
        raise ResourceError(
            f"coreset enumeration needs {total} subsets (budget {budget}); "
            "use the k-center radius path instead")
    vals = set()
    for size in range(1, min(s, n) + 1):
        for K in itertools.combinations(range(n), size):
            r = approx_meb(pts[list(K)], eps).radius
            vals.add(r)
            vals.add((1.0 + eps) * r)
    return RadiusCandidates(tuple(sorted(vals)), "coreset")
