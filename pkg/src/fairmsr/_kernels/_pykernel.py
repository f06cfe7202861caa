"""Pure-Python reference kernels.

Every floating-point operation here is mirrored one-for-one in ``_ckernel.pyx``
so both backends produce bit-identical results. Keep the two files in sync:
same accumulation order, division (not reciprocal multiplication) in the
Badoiu-Clarkson step, and the same membership expression.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

REL_TOL = 1e-9
ABS_FLOOR = 1e-12


def dist(p, q) -> float:
    s = 0.0
    for a, b in zip(p, q):
        t = a - b
        s += t * t
    return math.sqrt(s)


def pairwise_distances(pts: np.ndarray) -> np.ndarray:
    rows = pts.tolist()
    n = len(rows)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            v = dist(rows[i], rows[j])
            out[i, j] = v
            out[j, i] = v
    return out


def _bc(rows, iters):
    c = list(rows[0])
    d = len(c)
    for it in range(1, iters + 1):
        best = -1.0
        far = rows[0]
        for q in rows:
            s = 0.0
            for a in range(d):
                t = q[a] - c[a]
                s += t * t
            if s > best:
                best = s
                far = q
        if best == 0.0:
            break
        step = it + 1.0
        for a in range(d):
            c[a] = c[a] + (far[a] - c[a]) / step
    best = 0.0
    for q in rows:
        s = 0.0
        for a in range(d):
            t = q[a] - c[a]
            s += t * t
        if s > best:
            best = s
    return c, math.sqrt(best)


def bc_meb(pts: np.ndarray, iters: int):
    """Badoiu-Clarkson farthest-point iteration; radius is the exact max distance."""
    c, r = _bc(np.asarray(pts, dtype=float).tolist(), int(iters))
    return np.array(c), r


class SelectionState:
    """Mutable state of one Selection run, copyable for the DFS.

    Labels are 0-based here; ``members[j]`` lists point indices in the order
    they were selected into cluster ``j``.
    """

    __slots__ = ("rows", "dist", "excl", "gamma", "iters", "meb_fn",
                 "members", "covered", "owner", "centers", "radii", "order")

    def __init__(self, rows, dmat, excl, gamma, iters, meb_fn):
        self.rows = rows
        self.dist = dmat
        self.excl = excl
        self.gamma = gamma
        self.iters = iters
        self.meb_fn = meb_fn
        k = len(excl)
        self.members = [[] for _ in range(k)]
        self.covered = [False] * len(rows)
        self.owner = [-1] * len(rows)
        self.centers = [None] * k
        self.radii = [0.0] * k
        self.order = []

    def copy(self) -> "SelectionState":
        new = SelectionState.__new__(SelectionState)
        new.rows = self.rows
        new.dist = self.dist
        new.excl = self.excl
        new.gamma = self.gamma
        new.iters = self.iters
        new.meb_fn = self.meb_fn
        new.members = [list(m) for m in self.members]
        new.covered = list(self.covered)
        new.owner = list(self.owner)
        new.centers = list(self.centers)
        new.radii = list(self.radii)
        new.order = list(self.order)
        return new

    def next_point(self) -> int:
        """First point in input order outside X and outside every singleton exclusion ball."""
        singles = [(m[0], self.excl[j]) for j, m in enumerate(self.members) if len(m) == 1]
        dmat = self.dist
        for p, cov in enumerate(self.covered):
            if cov:
                continue
            for s, e in singles:
                if dmat[s][p] <= e:
                    break
            else:
                return p
        return -1

    def add(self, p: int, j: int) -> None:
        m = self.members[j]
        m.append(p)
        self.order.append(p)
        if len(m) < 2:
            self.owner[p] = j
            return
        if self.iters > 0:
            c, r = _bc([self.rows[i] for i in m], self.iters)
        else:
            c, r = self.meb_fn(tuple(m))
            c = [float(v) for v in c]
        rad = self.gamma * r
        self.centers[j] = c
        self.radii[j] = rad
        lim = rad * (1.0 + REL_TOL) + ABS_FLOOR
        cov = self.covered
        own = self.owner
        for q, row in enumerate(self.rows):
            if not cov[q] and dist(row, c) <= lim:
                cov[q] = True
                own[q] = j

    def finish(self, repair: bool):
        """Final balls: computed balls plus zero-radius balls on singletons.

        Returns ``(centers, radii, defined, owner)``. ``owner[q]`` is the
        cluster whose ball first covered q (or that holds q as a singleton).
        With ``repair`` two gaps are closed: a point left unowned only because
        of a singleton's exclusion ball joins the lowest-label such singleton,
        and every ball grows to reach its farthest owned point, so points an
        earlier version of the ball covered stay covered.
        """
        k = len(self.members)
        centers = list(self.centers)
        radii = list(self.radii)
        defined = [c is not None for c in centers]
        owner = list(self.owner)
        singles = []
        for j in range(k):
            if len(self.members[j]) == 1:
                s = self.members[j][0]
                centers[j] = list(self.rows[s])
                radii[j] = 0.0
                defined[j] = True
                singles.append((j, s))
        if repair:
            for q in range(len(self.rows)):
                if owner[q] >= 0:
                    continue
                for j, s in singles:
                    dq = self.dist[s][q]
                    if dq <= self.excl[j]:
                        owner[q] = j
                        if dq > radii[j]:
                            radii[j] = dq
                        break
            for q, j in enumerate(owner):
                if j >= 0 and len(self.members[j]) >= 2:
                    dq = dist(self.rows[q], centers[j])
                    if dq > radii[j]:
                        radii[j] = dq
        return centers, radii, defined, owner


def assign_points(rows, centers, radii, defined) -> list[int]:
    """Lowest-index ball containing each point, -1 when none does."""
    out = []
    lims = [r * (1.0 + REL_TOL) + ABS_FLOOR for r in radii]
    for row in rows:
        lab = -1
        for j, c in enumerate(centers):
            if defined[j] and dist(row, c) <= lims[j]:
                lab = j
                break
        out.append(lab)
    return out


def run_selection(pts, dmat, u, excl, gamma, iters, meb_fn, repair):
    """Run Selection on 0-based guess string ``u``; returns (state, steps, finish)."""
    rows = pts.tolist() if isinstance(pts, np.ndarray) else pts
    dl = dmat.tolist() if isinstance(dmat, np.ndarray) else dmat
    st = SelectionState(rows, dl, list(excl), gamma, iters, meb_fn)
    steps = 0
    for j in u:
        p = st.next_point()
        if p < 0:
            break
        st.add(p, j)
        steps += 1
    return st, steps, st.finish(repair)


def search_leaves(pts, dmat, excl, gamma, iters, meb_fn, cap, max_depth, group,
                  repair, max_nodes=0):
    """Depth-first enumeration of all reachable guess strings.

    Returns ``(leaves, nodes)`` where ``leaves`` holds, for each distinct final
    point assignment (ownership with ``repair``, lowest containing ball
    otherwise), the first (lexicographically smallest) guess string
    producing it: ``(u, assignment_bytes, centers, radii, defined)``.
    ``max_nodes`` of 0 means unlimited; exceeding it raises ``OverflowError``.
    """
    rows = pts.tolist()
    dl = dmat.tolist()
    k = len(excl)
    grp = list(group)
    seen = set()
    leaves = []
    path = []
    nodes = [0]

    def emit(st):
        centers, radii, defined, owner = st.finish(repair)
        lab = owner if repair else assign_points(rows, centers, radii, defined)
        key = bytes((x & 0xFF) for x in lab)
        if key in seen:
            return
        seen.add(key)
        leaves.append((tuple(path), key,
                       np.array([c if c is not None else [0.0] * len(rows[0])
                                 for c in centers], dtype=float),
                       np.array(radii, dtype=float),
                       np.array(defined, dtype=bool)))

    def rec(st, depth):
        nodes[0] += 1
        if max_nodes and nodes[0] > max_nodes:
            raise OverflowError("node budget exceeded")
        p = st.next_point() if depth < max_depth else -1
        if p < 0:
            emit(st)
            return
        branched = False
        for j in range(k):
            cnt = len(st.members[j])
            if cnt >= cap:
                continue
            if cnt == 0:
                blocked = False
                for i in range(j):
                    if grp[i] == grp[j] and not st.members[i]:
                        blocked = True
                        break
                if blocked:
                    continue
            child = st.copy()
            child.add(p, j)
            path.append(j)
            rec(child, depth + 1)
            path.pop()
            branched = True
        if not branched:
            emit(st)

    rec(SelectionState(rows, dl, list(excl), gamma, iters, meb_fn), 0)
    return leaves, nodes[0]
