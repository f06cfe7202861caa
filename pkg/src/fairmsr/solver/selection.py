"""Selection: turn a guess string and guessed radii into at most k balls."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .._kernels import _pykernel, kernel
from ..geometry import (ABS_FLOOR, MAX_BC_ITERS, TOL_GEO, Ball, UsageError, as_points,
                        bc_iterations, exact_meb)


def gamma_of(eps: float) -> float:
    """Enlargement factor 1 + eps + 2 sqrt(eps) applied to every computed ball."""
    return 1.0 + eps + 2.0 * math.sqrt(eps)


def exclusion_radius(r: float, eps: float) -> float:
    """Radius of the small ball kept around a singleton with guessed radius r."""
    return (eps / (1.0 + eps)) * r


def cluster_cap(eps: float) -> int:
    """Largest |S_i| a correct guess string can require."""
    return math.ceil(32.0 * (1.0 + eps) / eps ** 3)


def meb_route(eps: float) -> int:
    """Iterations for the approximate MEB, or 0 when the exact ball is used instead."""
    it = bc_iterations(eps)
    return it if it <= MAX_BC_ITERS else 0


def make_meb_fn(pts: np.ndarray) -> Callable:
    """Memoized exact MEB over member-index tuples, used when ``meb_route`` is 0."""
    cache: dict = {}

    def fn(members):
        key = tuple(sorted(members))
        hit = cache.get(key)
        if hit is None:
            b = exact_meb(pts[list(key)])
            hit = (np.array(b.center), b.radius)
            cache[key] = hit
        return hit

    return fn


@dataclass(frozen=True)
class SelectionResult:
    """Output balls (None for labels never used) plus the run's trace.

    ``selected[j]`` lists the point indices put into cluster j in selection
    order; ``order`` is the global selection order; ``steps`` <= n.
    ``owner[q]`` is the cluster whose ball first covered point q (or that
    holds it as a singleton), -1 if none did.
    """

    balls: tuple
    selected: tuple
    order: tuple
    steps: int
    owner: tuple


def _normalize_u(u: Sequence[int], k: int) -> list[int]:
    out = []
    for s in u:
        s = int(s)
        if not 1 <= s <= k:
            raise UsageError(f"guess symbol {s} outside 1..{k}")
        out.append(s - 1)
    return out


def selection(P, k: int, u: Sequence[int], radii: Sequence[float], eps: float,
              *, repair: bool = False) -> SelectionResult:
    """Run Selection on guess string ``u`` (symbols 1..k) with guessed radii.

    Each step picks the first point in input order that is neither covered
    by a computed ball nor inside a singleton's exclusion ball of radius
    eps/(1+eps) * radii[j]. From the second point on, cluster j's ball is the
    gamma-enlarged approximate MEB of its selected points. The run stops
    early once no point is selectable. Remaining singletons get radius 0.

    With ``repair`` the output is made to cover every point the run treated
    as handled: a singleton absorbs the points only its exclusion ball kept
    out, and each ball grows to reach the points its earlier versions
    covered.
    """
    pts = as_points(P)
    if not 0 < eps < 1:
        raise UsageError(f"eps must lie in (0, 1), got {eps}")
    if len(radii) != k:
        raise UsageError(f"need {k} radii, got {len(radii)}")
    if any(not r > 0 for r in radii):
        raise UsageError("guessed radii must be positive")
    u0 = _normalize_u(u, k)
    dmat = kernel.pairwise_distances(pts)
    excl = [exclusion_radius(float(r), eps) for r in radii]
    iters = meb_route(eps)
    meb_fn = make_meb_fn(pts) if iters == 0 else None
    # single runs use the reference implementation; the compiled search
    # reproduces it bit for bit
    st, steps, (centers, rads, defined, owner) = _pykernel.run_selection(
        pts, dmat, u0, excl, gamma_of(eps), iters, meb_fn, repair)
    balls = tuple(Ball(tuple(float(v) for v in centers[j]), float(rads[j])) if defined[j]
                  else None for j in range(k))
    return SelectionResult(balls, tuple(tuple(m) for m in st.members), tuple(st.order), steps,
                           tuple(owner))


def assignment(balls: Sequence[Ball | None], P, rel_tol: float = TOL_GEO) -> list[int]:
    """Lowest-index ball containing each point; -1 where no ball does."""
    pts = as_points(P)
    out = []
    for p in pts:
        lab = -1
        for j, b in enumerate(balls):
            if b is None:
                continue
            if kernel.dist(p, np.asarray(b.center)) <= b.radius * (1.0 + rel_tol) + ABS_FLOOR:
                lab = j
                break
        out.append(lab)
    return out


def balls_to_partition(balls: Sequence[Ball | None], P, max_uncovered: int = 0):
    """Partition P by lowest-index containing ball.

    Returns ``(clusters, uncovered)`` with one (possibly empty) index tuple
    per ball, or None when more than ``max_uncovered`` points lie in no ball.
    """
    lab = assignment(balls, P)
    uncovered = tuple(i for i, j in enumerate(lab) if j < 0)
    if len(uncovered) > max_uncovered:
        return None
    clusters = tuple(tuple(i for i, j in enumerate(lab) if j == c) for c in range(len(balls)))
    return clusters, uncovered
