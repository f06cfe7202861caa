"""Clustering search over guessed radii and guess strings, and the top-level solve.

The guessed radii influence Selection only through the singleton exclusion
test ``D[s, p] <= eps/(1+eps) * r``. A radius is therefore summarized by its
*class*: the number of distinct pairwise distances not exceeding its
exclusion radius. Radii tuples with the same multiset of classes describe the
same search up to a relabeling, so each multiset is searched once.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .._kernels import get_backend
from ..constraints import ColorTable, ConstraintSpec, Kind, satisfies, validate_colors
from ..geometry import Ball, ResourceError, UsageError, as_points, exact_meb
from ..kcenter import constrained_kcenter_plugin, gonzalez
from ..radii import (DEFAULT_SUBSET_BUDGET, coreset_radius_candidates,
                     largest_radius_candidates_kcenter, remaining_grid_array)
from .selection import cluster_cap, exclusion_radius, gamma_of, make_meb_fn, meb_route

MODES = ("engineering", "theoretical")
RADIUS_PATHS = ("auto", "kcenter", "coreset")
KCENTER_BETA = 2.0
MAX_K = 127  # leaf keys store cluster labels as signed bytes


def env_budget(default: int) -> int:
    """Enumeration budget, overridable through FAIR_MSR_BUDGET."""
    raw = os.environ.get("FAIR_MSR_BUDGET")
    if raw is None or not raw.strip():
        return default
    try:
        val = int(float(raw))
    except ValueError:
        raise UsageError(f"FAIR_MSR_BUDGET must be an integer, got {raw!r}") from None
    if val < 1:
        raise UsageError("FAIR_MSR_BUDGET must be positive")
    return val


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "engineering"
    radius_path: str = "auto"
    cap: int | None = None            # per-cluster cap override
    subset_budget: int | None = None  # coreset enumeration budget
    workers: int = 1
    max_nodes: int = 0                # per-branch DFS node budget, 0 = unlimited
    backend: str | None = None        # kernel backend, None = default

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}")
        if self.radius_path not in RADIUS_PATHS:
            raise UsageError(f"radius path must be one of {RADIUS_PATHS}")
        if self.workers < 1:
            raise UsageError("workers must be positive")
        if self.cap is not None and self.cap < 1:
            raise UsageError("cap must be positive")


@dataclass(frozen=True)
class Solution:
    """Result of a search; ``feasible`` is False when no valid clustering exists.

    ``clusters`` has one (possibly empty) tuple per label and ``balls`` the
    matching output balls (None where a label produced no ball).
    ``cluster_balls`` are exact MEBs of the nonempty clusters.
    """

    feasible: bool
    k: int
    clusters: tuple = ()
    outliers: tuple = ()
    balls: tuple = ()
    cluster_balls: tuple = ()
    reported_cost: float = math.inf
    refined_cost: float = math.inf
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def ball(b):
            return None if b is None else b.to_dict()
        return {
            "feasible": self.feasible,
            "k": self.k,
            "clusters": [list(c) for c in self.clusters],
            "outliers": list(self.outliers),
            "balls": [ball(b) for b in self.balls],
            "cluster_balls": [ball(b) for b in self.cluster_balls],
            "reported_cost": self.reported_cost if self.feasible else None,
            "refined_cost": self.refined_cost if self.feasible else None,
            "params": dict(self.params),
            "diagnostics": dict(self.diagnostics),
        }


def guarantee_factor(eps: float, k: int, mode: str) -> float:
    """Approximation factor promised for the given mode."""
    if mode == "theoretical":
        return 1.0 + eps
    return (1.0 + eps) ** k * gamma_of(eps) ** (k - 1)


def working_eps(eps: float, k: int, mode: str) -> float:
    if mode == "theoretical":
        return (eps / (12.0 * k)) ** 2
    return eps


# ---------------------------------------------------------------- branches

@dataclass(frozen=True)
class Branch:
    index: int
    classes: tuple      # per label, non-increasing
    radii: tuple        # representative guessed radius per label
    r_max: float
    excl: tuple


def enumerate_branches(dist_values: np.ndarray, r_max_list, k: int, eps: float) -> list[Branch]:
    """Distinct class multisets over all (r_max, remaining radii) tuples.

    ``dist_values`` are the sorted distinct pairwise distances. Branches come
    out in order of first occurrence, scanning r_max ascending and remaining
    tuples in lexicographic grid order.
    """
    coef = eps / (1.0 + eps)
    seen: set = set()
    done: set = set()
    out: list[Branch] = []
    for r_max in sorted(float(r) for r in r_max_list):
        c1 = int(np.searchsorted(dist_values, exclusion_radius(r_max, eps), side="right"))
        if k > 1:
            grid = remaining_grid_array(r_max, k, eps)
            cls = np.searchsorted(dist_values, coef * grid, side="right")
            uniq, first = np.unique(cls, return_index=True)
            sig = (c1, tuple(uniq.tolist()))
        else:
            sig = (c1, ())
        if sig in done:
            continue
        done.add(sig)
        if k == 1:
            combos = [()]
        else:
            reps = [(int(c), float(grid[i])) for c, i in zip(uniq, first)]
            combos = itertools.combinations_with_replacement(reps, k - 1)
        for combo in combos:
            pairs = sorted([(c1, r_max)] + list(combo), key=lambda t: (-t[0], -t[1]))
            key = tuple(c for c, _ in pairs)
            if key in seen:
                continue
            seen.add(key)
            radii = tuple(r for _, r in pairs)
            out.append(Branch(len(out), key, radii, r_max,
                              tuple(exclusion_radius(r, eps) for r in radii)))
    return out


# ---------------------------------------------------------------- evaluation

class _Evaluator:
    """Validity, constraint check and refined cost of final assignments, cached."""

    def __init__(self, pts, k, colors, spec):
        self.pts = pts
        self.n = len(pts)
        self.k = k
        self.colors = colors
        self.spec = spec
        self.allowed = spec.outliers if spec.kind is Kind.OUTLIERS else 0
        self.meb_cache: dict = {}
        self.cache: dict = {}

    def meb(self, members: tuple) -> Ball:
        b = self.meb_cache.get(members)
        if b is None:
            b = exact_meb(self.pts[list(members)])
            self.meb_cache[members] = b
        return b

    def evaluate(self, key: bytes):
        hit = self.cache.get(key)
        if hit is None:
            hit = self._evaluate(key)
            self.cache[key] = hit
        return hit

    def _evaluate(self, key: bytes):
        lab = np.frombuffer(key, dtype=np.int8)
        uncovered = tuple(int(i) for i in np.flatnonzero(lab < 0))
        if len(uncovered) > self.allowed:
            return None
        clusters = tuple(tuple(int(i) for i in np.flatnonzero(lab == j)) for j in range(self.k))
        if not satisfies([c for c in clusters if c], self.colors, self.spec, self.n):
            return None
        cost = math.fsum(self.meb(c).radius for c in clusters if c)
        return cost, clusters, uncovered


def _search_chunk(args):
    (pts, dmat, branches, k, eps, cap, colors, spec, repair, max_nodes, backend) = args
    kern = get_backend(backend)
    ev = _Evaluator(pts, k, colors, spec)
    gamma = gamma_of(eps)
    iters = meb_route(eps)
    meb_fn = make_meb_fn(pts) if iters == 0 else None
    n = len(pts)
    best = None
    nodes = leaves = 0
    for br in branches:
        group = list(br.classes)
        try:
            found, cnt = kern.search_leaves(pts, dmat, np.array(br.excl), gamma, iters, meb_fn,
                                            cap, n, group, repair, max_nodes)
        except OverflowError:
            raise ResourceError(f"node budget {max_nodes} exceeded in branch {br.index}") from None
        nodes += cnt
        leaves += len(found)
        for u, key, centers, radii, defined in found:
            res = ev.evaluate(key)
            if res is None:
                continue
            cand = (res[0], br.index, tuple(u))
            if best is None or cand < best[0]:
                best = (cand, res, centers, radii, defined)
    return best, nodes, leaves


def _chunks(items: list, m: int) -> list[list]:
    # round-robin keeps chunk costs similar; the merge is order-independent
    return [items[i::m] for i in range(m) if items[i::m]]


def _single_cluster(pts, k, colors, spec):
    n = len(pts)
    allc = tuple(range(n))
    if not satisfies([allc], colors, spec, n):
        return None
    b = exact_meb(pts)
    return b.radius, (allc,) + ((),) * (k - 1), b


def clustering_search(P, k: int, eps: float, r_max, colors: ColorTable | None = None,
                      spec: ConstraintSpec | None = None,
                      options: SolveOptions | None = None) -> Solution:
    """Best valid clustering over all guessed radii and guess strings.

    ``r_max`` is one candidate for the largest radius or a sequence of them.
    The incumbent starts at the single-cluster solution when that satisfies
    the constraint. Ties on refined cost go to the earliest branch, then the
    lexicographically smallest guess string, so the result does not depend
    on the worker count.
    """
    pts = as_points(P)
    spec = spec or ConstraintSpec.unconstrained()
    options = options or SolveOptions()
    n = len(pts)
    if n == 0:
        raise UsageError("empty instance")
    if not 1 <= k <= MAX_K:
        raise UsageError(f"k must lie in [1, {MAX_K}]")
    if not 0 < eps < 1:
        raise UsageError(f"eps must lie in (0, 1), got {eps}")
    validate_colors(colors, spec, n)
    r_list = [float(r_max)] if np.ndim(r_max) == 0 else [float(r) for r in r_max]
    r_list = [r for r in r_list if r > 0]
    if not r_list:
        raise UsageError("need a positive r_max candidate")

    kern = get_backend(options.backend)
    dmat = kern.pairwise_distances(pts)
    dist_values = np.unique(dmat)
    branches = enumerate_branches(dist_values, r_list, k, eps)
    cap = options.cap if options.cap is not None else cluster_cap(eps)
    cap = min(cap, n + 1)

    best = None
    init = _single_cluster(pts, k, colors, spec)
    if init is not None:
        cost, clusters, b = init
        best = ((cost, -1, ()), (cost, clusters, ()), None, None, None, b)

    args = [(pts, dmat, ch, k, eps, cap, colors, spec, True, options.max_nodes, options.backend)
            for ch in _chunks(branches, options.workers)]
    if options.workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=options.workers) as ex:
            results = list(ex.map(_search_chunk, args))
    else:
        results = [_search_chunk(a) for a in args]
    nodes = sum(r[1] for r in results)
    leaves = sum(r[2] for r in results)
    for r in results:
        if r[0] is not None and (best is None or r[0][0] < best[0]):
            best = r[0] + (None,)

    diag = {
        "r_max_candidates": len(r_list),
        "r_max_range": [min(r_list), max(r_list)],
        "remaining_grid_size": int(len(remaining_grid_array(max(r_list), k, eps))) if k > 1 else 0,
        "distinct_distances": int(len(dist_values)),
        "branches": len(branches),
        "nodes": int(nodes),
        "leaves": int(leaves),
        "cap": int(cap),
    }
    params = {"k": k, "eps_work": eps, "gamma": gamma_of(eps), "constraint": spec.describe()}
    if best is None:
        return Solution(False, k, params=params, diagnostics=diag)

    (cost, bidx, u), (_, clusters, uncovered) = best[0], best[1]
    if bidx < 0:
        balls = (best[5],) + (None,) * (k - 1)
        params.update(r_max=None, radii=None, guess=None, branch=None, source="single-cluster")
    else:
        centers, radii, defined = best[2], best[3], best[4]
        balls = tuple(Ball(tuple(float(v) for v in centers[j]), float(radii[j])) if defined[j]
                      else None for j in range(k))
        br = branches[bidx]
        params.update(r_max=br.r_max, radii=list(br.radii), guess=[j + 1 for j in u],
                      branch=bidx, source="search")
    ev = _Evaluator(pts, k, colors, spec)
    cluster_balls = tuple(ev.meb(c) if c else None for c in clusters)
    reported = math.fsum(b.radius for b in balls if b is not None)
    return Solution(True, k, clusters, uncovered, balls, cluster_balls, reported, cost,
                    params, diag)


# ---------------------------------------------------------------- solve

def _rgs(m: int, k: int):
    """Restricted-growth strings of length m with at most k blocks."""
    a = [0] * m

    def rec(i, mx):
        if i == m:
            yield tuple(a)
            return
        for v in range(min(mx + 2, k)):
            a[i] = v
            yield from rec(i + 1, max(mx, v))

    if m == 0:
        yield ()
        return
    yield from rec(1, 0)


def _zero_radius(pts, k, colors, spec, site_idx) -> Solution:
    # every point coincides with one of at most k sites: try each grouping
    # of the sites; splitting a site never helps a mergeable constraint
    n = len(pts)
    site_of = np.empty(n, dtype=int)
    for i in range(n):
        for s, c in enumerate(site_idx):
            if np.array_equal(pts[i], pts[c]):
                site_of[i] = s
                break
    ev = _Evaluator(pts, k, colors, spec)
    best = None
    for code in _rgs(len(site_idx), k):
        clusters = tuple(tuple(int(i) for i in range(n) if code[site_of[i]] == j)
                         for j in range(k))
        if not satisfies([c for c in clusters if c], colors, spec, n):
            continue
        cost = math.fsum(ev.meb(c).radius for c in clusters if c)
        if best is None or cost < best[0]:
            best = (cost, clusters)
    if best is None:
        return None
    cost, clusters = best
    balls = tuple(ev.meb(c) if c else None for c in clusters)
    return Solution(True, k, clusters, (), balls, balls, cost, cost)


def solve(P, k: int, eps: float, colors: ColorTable | None = None,
          spec: ConstraintSpec | None = None, options: SolveOptions | None = None) -> Solution:
    """(1+eps)-approximate constrained k-min-sum-radii.

    Engineering mode runs the search at the given eps and promises the
    factor (1+eps)^k gamma^(k-1); theoretical mode runs at (eps/12k)^2 and
    promises 1+eps. The largest radius is guessed from a registered
    k-center approximation when one exists for the constraint, otherwise
    from approximate MEBs of small subsets.
    """
    pts = as_points(P)
    spec = spec or ConstraintSpec.unconstrained()
    options = options or SolveOptions()
    n = len(pts)
    if n == 0:
        raise UsageError("empty instance")
    if not 1 <= k <= MAX_K:
        raise UsageError(f"k must lie in [1, {MAX_K}]")
    if not 0 < eps < 0.5:
        raise UsageError(f"epsilon must lie in (0, 0.5), got {eps}")
    validate_colors(colors, spec, n)
    eps_w = working_eps(eps, k, options.mode)
    params = {"k": k, "eps": eps, "eps_work": eps_w, "mode": options.mode,
              "constraint": spec.describe(),
              "guarantee_factor": guarantee_factor(eps, k, options.mode)}

    kc = gonzalez(pts, k)
    if kc.value == 0.0:
        sol = _zero_radius(pts, k, colors, spec, kc.centers)
        diag = {"zero_radius": True, "sites": len(kc.centers)}
        if sol is None:
            return Solution(False, k, params=params, diagnostics=diag)
        params.update(radius_path="zero-radius", source="zero-radius")
        return replace(sol, params=params, diagnostics=diag)

    path = options.radius_path
    plug = None
    if path in ("auto", "kcenter"):
        plug = constrained_kcenter_plugin(pts, k, colors, spec)
        if plug is None and path == "kcenter":
            raise UsageError(f"no k-center approximation registered for {spec.kind.value}")
    if plug is not None:
        if plug.value <= 0:
            raise UsageError("k-center plugin returned a zero value on a nonzero instance")
        cands = largest_radius_candidates_kcenter(plug.value, plug.factor, KCENTER_BETA, k, eps_w)
        path = "kcenter"
    else:
        budget = options.subset_budget or env_budget(DEFAULT_SUBSET_BUDGET)
        cands = coreset_radius_candidates(pts, eps_w, budget)
        path = "coreset"
    r_list = [r for r in cands.values if r > 0]

    sol = clustering_search(pts, k, eps_w, r_list, colors, spec, options)
    params.update({key: v for key, v in sol.params.items() if key not in params})
    params["radius_path"] = path
    diag = dict(sol.diagnostics, zero_radius=False, kcenter_value=kc.value)
    return replace(sol, params=params, diagnostics=diag)
