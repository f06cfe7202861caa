"""Executable versions of two existence arguments, used as test instruments.

``separate_and_balance`` turns any covering into a gamma-separated,
eps-balanced one by merging close balls and raising small radii.
``record_guess_string`` replays Selection against a known disjoint covering
and writes down which ball each selected point belongs to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import _pykernel
from .geometry import TOL_GEO, Ball, UsageError, as_points, ball_contains, exact_meb
from .solver.selection import exclusion_radius, gamma_of, make_meb_fn, meb_route


@dataclass(frozen=True)
class Covering:
    balls: tuple
    gamma: float = 1.0
    eps_bal: float = 0.0

    @property
    def cost(self) -> float:
        return math.fsum(b.radius for b in self.balls)

    def covers(self, P, rel_tol: float = TOL_GEO) -> bool:
        return all(any(ball_contains(b, p, rel_tol) for b in self.balls) for p in as_points(P))

    def is_separated(self, gamma: float) -> bool:
        """Every pair stays disjoint after scaling both radii by gamma."""
        bs = self.balls
        for i in range(len(bs)):
            for j in range(i + 1, len(bs)):
                d = math.dist(bs[i].center, bs[j].center)
                if not d > gamma * (bs[i].radius + bs[j].radius):
                    return False
        return True

    def is_balanced(self, eps: float, k: int) -> bool:
        if not self.balls:
            return True
        rmax = max(b.radius for b in self.balls)
        return all(b.radius >= (eps / k) * rmax for b in self.balls)

    def is_disjoint(self) -> bool:
        return self.is_separated(1.0)


@dataclass(frozen=True)
class SepBalResult:
    covering: Covering
    members: tuple      # point indices owned by each output ball
    phases: int


def _components(n: int, edges) -> list[list[int]]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[r] for r in sorted(groups)]


def _merged_ball(pts, members, balls, contain_balls: bool) -> Ball:
    if members:
        c = np.array(exact_meb(pts[list(members)]).center)
    else:
        c = np.array(exact_meb(np.array([b.center for b in balls])).center)
    r = max((math.dist(c, pts[i]) for i in members), default=0.0)
    if contain_balls:
        r = max([r] + [math.dist(c, b.center) + b.radius for b in balls])
    return Ball(tuple(float(v) for v in c), float(r))


def induced_members(balls: Sequence[Ball], P) -> tuple:
    """Point indices per ball, each point going to its lowest-index containing ball."""
    pts = as_points(P)
    out = [[] for _ in balls]
    for i, p in enumerate(pts):
        for j, b in enumerate(balls):
            if ball_contains(b, p):
                out[j].append(i)
                break
        else:
            raise UsageError(f"point {i} lies in no ball of the covering")
    return tuple(tuple(m) for m in out)


def separate_and_balance(cov: Covering, gamma: float, eps: float, P, k: int | None = None,
                         members: Sequence[Sequence[int]] | None = None,
                         contain_balls: bool = True) -> SepBalResult:
    """Alternate merging and balancing until gamma-separated and eps-balanced.

    A merge phase joins every connected component of the graph with edges
    dist(c_i, c_j) <= gamma (r_i + r_j) into the exact MEB of the component's
    points, enlarged (with ``contain_balls``) to contain its member balls.
    A balance phase raises radii below (eps/k) max r to that value in place.
    Merging is the only step that changes memberships, so a mergeable
    constraint satisfied by the input clusters holds for the output.
    """
    pts = as_points(P)
    if gamma < 1 or not eps > 0:
        raise UsageError("need gamma >= 1 and eps > 0")
    balls = list(cov.balls)
    if not balls:
        raise UsageError("empty covering")
    k = k or len(balls)
    mem = [tuple(m) for m in members] if members is not None else list(induced_members(balls, pts))
    phases = 0
    while True:
        cur = Covering(tuple(balls), gamma, eps)
        if cur.is_separated(gamma) and cur.is_balanced(eps, k):
            break
        phases += 1
        edges = [(i, j) for i in range(len(balls)) for j in range(i + 1, len(balls))
                 if math.dist(balls[i].center, balls[j].center)
                 <= gamma * (balls[i].radius + balls[j].radius)]
        new_balls, new_mem = [], []
        for comp in _components(len(balls), edges):
            if len(comp) == 1:
                new_balls.append(balls[comp[0]])
                new_mem.append(mem[comp[0]])
                continue
            m = tuple(sorted(i for c in comp for i in mem[c]))
            new_balls.append(_merged_ball(pts, m, [balls[c] for c in comp], contain_balls))
            new_mem.append(m)
        balls, mem = new_balls, new_mem
        floor = (eps / k) * max(b.radius for b in balls)
        balls = [b if b.radius >= floor else Ball(b.center, floor) for b in balls]
    return SepBalResult(Covering(tuple(balls), gamma, eps), tuple(mem), phases)


def record_guess_string(P, cov: Covering, radii: Sequence[float], eps: float) -> tuple:
    """Guess string (symbols 1..k) that tells Selection the true ball of each
    point it selects, for a disjoint covering ``cov`` of P.
    """
    pts = as_points(P)
    k = len(cov.balls)
    if len(radii) != k:
        raise UsageError(f"need {k} radii, got {len(radii)}")
    dmat = _pykernel.pairwise_distances(pts)
    iters = meb_route(eps)
    st = _pykernel.SelectionState(pts.tolist(), dmat.tolist(),
                                  [exclusion_radius(float(r), eps) for r in radii],
                                  gamma_of(eps), iters, make_meb_fn(pts) if iters == 0 else None)
    u = []
    while True:
        p = st.next_point()
        if p < 0:
            break
        owners = [j for j, b in enumerate(cov.balls) if ball_contains(b, pts[p])]
        if len(owners) != 1:
            raise UsageError(f"selected point {p} lies in {len(owners)} covering balls")
        st.add(p, owners[0])
        u.append(owners[0] + 1)
    return tuple(u)
