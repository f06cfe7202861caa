"""Points, balls, distances and minimum enclosing balls."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import kernel

TOL_GEO = 1e-9
ABS_FLOOR = 1e-12

# Above this many Badoiu-Clarkson iterations the exact ball is cheaper and
# trivially satisfies the (1+eps) contract.
MAX_BC_ITERS = 10_000


class UsageError(ValueError):
    """Invalid arguments or malformed instance data."""


class ResourceError(RuntimeError):
    """An enumeration budget was exceeded."""


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise UsageError(f"ball radius must be nonnegative, got {self.radius}")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def contains(self, p, rel_tol: float = TOL_GEO) -> bool:
        return ball_contains(self, p, rel_tol)

    def to_dict(self) -> dict:
        return {"center": list(self.center), "radius": self.radius}


class PointSet:
    """An ordered, immutable set of points in R^d.

    The input order is significant (Selection scans it) and is never changed.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        try:
            arr = np.array(coords, dtype=float, copy=True)
        except (ValueError, TypeError):
            raise UsageError("points must share one dimension and be numeric") from None
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 1)
        if arr.ndim != 2:
            raise UsageError("points must form a 2-d array (n, d)")
        if arr.shape[1] < 1:
            raise UsageError("dimension must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise UsageError("all coordinates must be finite")
        arr.setflags(write=False)
        self.coords = arr

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)}, d={self.dimension})"


def as_points(P) -> np.ndarray:
    """Coerce a PointSet or array-like to a read-only (n, d) float array."""
    if isinstance(P, PointSet):
        return P.coords
    return PointSet(P).coords


def distance(p, q) -> float:
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise UsageError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    return float(kernel.dist(p, q))


def ball_contains(b: Ball, p, rel_tol: float = TOL_GEO) -> bool:
    return distance(b.center, p) <= b.radius * (1.0 + rel_tol) + ABS_FLOOR


def _circumball(S: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest ball with all rows of S on its boundary (center in their affine hull)."""
    if len(S) == 0:
        # encloses nothing: every point is a violator
        return np.zeros(S.shape[1]), -1.0
    p0 = S[0]
    if len(S) == 1:
        return p0.copy(), 0.0
    U = S[1:] - p0
    A = 2.0 * (U @ U.T)
    b = np.einsum("ij,ij->i", U, U)
    try:
        lam = np.linalg.solve(A, b)
        if not np.all(np.isfinite(lam)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(A, b, rcond=None)[0]
    c = p0 + lam @ U
    return c, float(np.sum((c - p0) ** 2))


def _mtf(P: np.ndarray, order: np.ndarray, end: int, support: list, d: int):
    # Welzl's move-to-front recursion. Violators are found vectorized; the
    # relative slack on squared distances keeps near-cospherical points from
    # being re-added as support.
    c, r2 = _circumball(P[support])
    if len(support) == d + 1:
        return c, r2
    i = 0
    while i < end:
        idx = order[i:end]
        diff = P[idx] - c
        sq = np.einsum("ij,ij->i", diff, diff)
        viol = np.flatnonzero(sq > r2 * (1.0 + 1e-12) + 1e-300)
        if viol.size == 0:
            break
        j = i + int(viol[0])
        p = int(order[j])
        c, r2 = _mtf(P, order, j, support + [p], d)
        order[1:j + 1] = order[:j].copy()
        order[0] = p
        i = j + 1
    return c, r2


def exact_meb(points) -> Ball:
    """Minimum enclosing ball by Welzl's move-to-front algorithm.

    The radius is reset to the true farthest distance from the computed
    center, so enclosure is exact; minimality holds to ~1e-12 relative.
    Deterministic for a fixed input order.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.shape[0] == 0:
        raise UsageError("exact_meb needs at least one point")
    n, d = P.shape
    order = np.arange(n)
    c, _ = _mtf(P, order, n, [], d)
    diff = P - c
    r = math.sqrt(float(np.max(np.einsum("ij,ij->i", diff, diff))))
    return Ball(tuple(float(v) for v in c), r)


def bc_iterations(eps: float) -> int:
    return math.ceil(1.0 / (eps * eps))


def approx_meb(points, eps: float) -> Ball:
    """(1+eps)-approximate enclosing ball by farthest-point iteration.

    Starts at the first point and, for i = 1..ceil(1/eps^2), moves the center
    a 1/(i+1) fraction toward the current farthest point. The returned radius
    is the exact farthest distance from the final center, so every input point
    is enclosed unconditionally.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.shape[0] == 0:
        raise UsageError("approx_meb needs at least one point")
    if not 0 < eps < 1:
        raise UsageError(f"eps must lie in (0, 1), got {eps}")
    iters = bc_iterations(eps)
    if iters > MAX_BC_ITERS:
        return exact_meb(P)
    c, r = kernel.bc_meb(np.ascontiguousarray(P), iters)
    return Ball(tuple(float(v) for v in c), float(r))


def meb_cost(points) -> float:
    return exact_meb(points).radius


def is_enclosing(b: Ball, points: Sequence, rel_tol: float = TOL_GEO) -> bool:
    return all(ball_contains(b, p, rel_tol) for p in np.asarray(points, dtype=float))
