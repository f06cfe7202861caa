"""Seeded instance generators for the CLI, the benchmark suites and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constraints import ColorTable
from .geometry import Ball, UsageError
from .sepbal import Covering
from .solver.selection import gamma_of


def two_pairs() -> np.ndarray:
    return np.array([(0.0, 0.0), (1.0, 0.0), (100.0, 0.0), (101.0, 0.0)])


def uniform_points(rng: np.random.Generator, n: int, d: int = 2) -> np.ndarray:
    return rng.random((n, d))


def fair_colors(sizes, rng: np.random.Generator | None = None) -> ColorTable:
    """Two colors alternating inside each group of the given (even) sizes.

    Every group has equal color counts, so each group satisfies exact
    fairness when the total is balanced too.
    """
    out = []
    for s in sizes:
        if s % 2:
            raise UsageError("exact-fair two-coloring needs even group sizes")
        cols = [0, 1] * (s // 2)
        if rng is not None:
            rng.shuffle(cols)
        out.extend(cols)
    return ColorTable(tuple(out), ("0", "1"))


def uniform_in_ball(rng: np.random.Generator, center, radius: float, m: int) -> np.ndarray:
    d = len(center)
    g = rng.standard_normal((m, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(m) ** (1.0 / d)
    return np.asarray(center) + g * r[:, None]


def _place_centers(rng, radii, d, need) -> np.ndarray:
    # rejection sampling in a box just large enough to hold the configuration
    k = len(radii)
    scale = max(need(i, j) for i in range(k) for j in range(k) if i != j) if k > 1 else 1.0
    for attempt in range(100_000):
        box = scale * (1.0 + attempt / 1000.0)
        C = rng.uniform(-box, box, size=(k, d))
        if all(np.linalg.norm(C[i] - C[j]) > need(i, j) for i in range(k) for j in range(i + 1, k)):
            return C
    raise RuntimeError("could not place separated centers")


@dataclass(frozen=True)
class PlantedInstance:
    points: np.ndarray
    covering: Covering      # planted balls B(c*_i, r*_i)
    guessed: tuple          # r~_i in [r*_i, (1+eps) r*_i]
    labels: tuple           # planted ball of each point
    eps: float


def planted_separated(rng: np.random.Generator, k: int, d: int, eps: float,
                      sizes=None, margin=(0.01, 0.5)) -> PlantedInstance:
    """Points inside k balls whose pairwise center distance exceeds
    (1+eps) gamma (r_i + r_j) times a random margin factor. Points are
    shuffled so Selection meets the clusters interleaved.
    """
    gamma = gamma_of(eps)
    radii = rng.uniform(0.5, 1.0, size=k)
    fac = 1.0 + rng.uniform(*margin, size=(k, k))
    fac = np.maximum(fac, fac.T)

    def need(i, j):
        return (1.0 + eps) * gamma * (radii[i] + radii[j]) * fac[i, j]

    C = _place_centers(rng, radii, d, need)
    if sizes is None:
        sizes = rng.integers(1, 9, size=k)
    pts, labs = [], []
    for i in range(k):
        pts.append(uniform_in_ball(rng, C[i], radii[i], int(sizes[i])))
        labs += [i] * int(sizes[i])
    P = np.vstack(pts)
    perm = rng.permutation(len(P))
    P, labs = P[perm], [labs[i] for i in perm]
    cov = Covering(tuple(Ball(tuple(float(v) for v in C[i]), float(radii[i])) for i in range(k)),
                   gamma, eps)
    guessed = tuple(float(r * (1.0 + eps * rng.random())) for r in radii)
    return PlantedInstance(P, cov, guessed, tuple(labs), eps)


def gaussian_planted(rng: np.random.Generator, n: int, d: int, k: int, separation: float,
                     spread: float = 1.0):
    """Gaussian blobs whose bounding balls are ``separation``-separated.

    Returns (points, sizes, covering) with the covering made of each blob's
    center and farthest-member radius, points grouped blob by blob.
    """
    if k < 1 or n < k:
        raise UsageError(f"cannot plant {k} clusters with {n} points")
    if separation <= 0:
        raise UsageError("separation must be positive")
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    blobs = [rng.standard_normal((s, d)) * spread for s in sizes]
    radii = [max(float(np.max(np.linalg.norm(b, axis=1))), 1e-9) for b in blobs]

    def need(i, j):
        return separation * (radii[i] + radii[j])

    C = _place_centers(rng, radii, d, need)
    P = np.vstack([C[i] + blobs[i] for i in range(k)])
    cov = Covering(tuple(Ball(tuple(float(v) for v in C[i]), radii[i]) for i in range(k)),
                   separation, 0.0)
    return P, sizes, cov


def locality_instance() -> tuple[np.ndarray, dict]:
    """16 points on a circle of radius 1.5 plus one point c1 at distance 0.5
    outside it, next to the circle point x = (-1.5, 0).

    With k = 2 the optimum keeps c1 alone (cost 1.5) although x and its
    neighbours lie closer to c1 than to the circle's center.
    """
    ang = 2.0 * math.pi * np.arange(16) / 16.0
    circle = 1.5 * np.column_stack([np.cos(ang), np.sin(ang)])
    circle = np.round(circle, 15)
    c1 = np.array([[-2.0, 0.0]])
    P = np.vstack([circle, c1])
    x = int(np.argmin(np.linalg.norm(circle - np.array([-1.5, 0.0]), axis=1)))
    return P, {"c1": 16, "x": x, "circle": tuple(range(16)), "optimum": 1.5}
