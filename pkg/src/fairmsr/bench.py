"""Seeded benchmark campaigns: solver versus oracle, interval audit, grid audit.

Each suite yields one row per trial and a summary. Reports are plain text
and byte-identical for a fixed seed; wall time appears only on request.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constraints import (ColorTable, ConstraintSpec, Kind, _cluster_ok, cluster_satisfies,
                          merged, satisfies)
from .geometry import Ball, approx_meb, ball_contains, exact_meb
from .instances import locality_instance, planted_separated, uniform_in_ball
from .io import digest
from .kcenter import gonzalez
from .oracle import exact_msr, partition_count
from .radii import coreset_radius_candidates, geometric_grid, remaining_radii_candidates
from .sepbal import Covering, record_guess_string, separate_and_balance
from .solver import SolveOptions, cluster_cap, gamma_of, guarantee_factor, selection, solve


@dataclass
class Report:
    suite: str
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def format(self) -> str:
        def cell(v):
            if isinstance(v, float):
                return repr(v)
            return str(v)
        lines = ["\t".join(self.columns)]
        lines += ["\t".join(cell(v) for v in row) for row in self.rows]
        lines.append("# summary " + " ".join(f"{k}={cell(v)}" for k, v in self.summary.items()))
        return "\n".join(lines) + "\n"


def _random_points(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    # half uniform, half a few tight blobs so the optimum is not always trivial
    if rng.random() < 0.5:
        return rng.random((n, d))
    m = int(rng.integers(1, 4))
    centers = rng.random((m, d)) * 4.0
    which = rng.integers(0, m, size=n)
    return centers[which] + 0.3 * rng.standard_normal((n, d))


def ratio_instance(rng: np.random.Generator, trial: int, n_max: int = 8):
    """Instance for the solver-versus-oracle suite: n <= n_max, d = 2, two colors."""
    n = int(rng.integers(2, n_max + 1))
    P = _random_points(rng, n, 2)
    if trial % 2:
        cols = [0, 1] * (n // 2) + [0] * (n % 2)
        rng.shuffle(cols)
        return P, ColorTable(tuple(cols), ("0", "1")), ConstraintSpec.exact_fairness()
    return P, None, ConstraintSpec.unconstrained()


def ratio_vs_oracle(trials: int, seed: int, eps: float = 0.3, k: int = 2,
                    mode: str = "engineering", workers: int = 1, timing: bool = False,
                    n_max: int = 8) -> Report:
    cols = ["trial", "digest", "constraint", "n", "oracle_cost", "solver_cost", "ratio"]
    if timing:
        cols.append("seconds")
    rep = Report("ratio-vs-oracle" if mode == "engineering" else "theoretical-micro", cols)
    rng = np.random.default_rng(seed)
    bound = guarantee_factor(eps, k, mode)
    worst = 1.0
    violations = 0
    for t in range(trials):
        P, colors, spec = ratio_instance(rng, t, n_max)
        t0 = time.perf_counter()
        sol = solve(P, k, eps, colors, spec, SolveOptions(mode=mode, workers=workers))
        dt = time.perf_counter() - t0
        orc = exact_msr(P, k, colors, spec)
        if orc.cost > 0:
            ratio = sol.refined_cost / orc.cost
        else:
            ratio = 1.0 if sol.refined_cost <= 1e-12 else math.inf
        worst = max(worst, ratio)
        if ratio > bound + 1e-9:
            violations += 1
        row = [t, digest(P, colors), spec.describe(), len(P), orc.cost, sol.refined_cost, ratio]
        if timing:
            row.append(round(dt, 4))
        rep.rows.append(row)
    rep.summary = {"trials": trials, "max_ratio": worst, "bound": bound,
                   "violations": violations}
    return rep


def interval_instance(rng: np.random.Generator):
    k = int(rng.integers(2, 4))
    n = int(rng.integers(2, 13 if k == 2 else 10))
    return _random_points(rng, n, int(rng.integers(1, 4))), k


def lemma_interval(trials: int, seed: int, timing: bool = False) -> Report:
    """Largest optimal radius against [r_alpha/2, 2 k^2 r_alpha] with Gonzalez r_alpha."""
    cols = ["trial", "digest", "k", "n", "r1_star", "r_alpha", "lower", "upper", "ok"]
    if timing:
        cols.append("seconds")
    rep = Report("lemma-interval", cols)
    rng = np.random.default_rng(seed)
    violations = 0
    for t in range(trials):
        P, k = interval_instance(rng)
        t0 = time.perf_counter()
        orc = exact_msr(P, k)
        r1 = max(exact_meb(P[list(c)]).radius for c in orc.clusters if c)
        ra = gonzalez(P, k).value
        lo, hi = ra / 2.0, 2.0 * k * k * ra
        ok = lo - 1e-9 <= r1 <= hi + 1e-9
        violations += not ok
        row = [t, digest(P), k, len(P), r1, ra, lo, hi, int(ok)]
        if timing:
            row.append(round(time.perf_counter() - t0, 4))
        rep.rows.append(row)
    rep.summary = {"trials": trials, "violations": violations}
    return rep


def grid_trial(rng: np.random.Generator):
    a = 10.0 ** rng.uniform(-3, 3)
    b = a * 10.0 ** rng.uniform(0, 3)
    eps = float(rng.uniform(0.01, 0.99))
    r = a * (b / a) ** rng.random()
    return a, b, eps, min(max(r, a), b)


def balanced_profile(rng: np.random.Generator):
    """(k, eps, radii, r_max) with an eps-balanced radius profile and
    r1 <= r_max <= (1+eps) r1 for the largest radius r1."""
    k = int(rng.integers(1, 6))
    eps = float(rng.uniform(0.01, 0.99))
    r1 = 10.0 ** rng.uniform(-3, 3)
    radii = [r1] + [r1 * ((eps / k) + (1 - eps / k) * rng.random()) for _ in range(k - 1)]
    r_max = r1 * (1.0 + eps * rng.random())
    return k, eps, radii, r_max


def grid_covering(trials: int, seed: int, timing: bool = False) -> Report:
    cols = ["trial", "kind", "eps", "r_star", "covered_by", "ok"]
    rep = Report("grid-covering", cols)
    rng = np.random.default_rng(seed)
    violations = 0
    t0 = time.perf_counter()
    for t in range(trials):
        a, b, eps, r = grid_trial(rng)
        hit = geometric_grid(a, b, eps).covering_value(r, eps)
        ok = hit is not None
        violations += not ok
        rep.rows.append([t, "interval", eps, r, hit if ok else "none", int(ok)])
        k, eps, radii, r_max = balanced_profile(rng)
        grid = remaining_radii_candidates(r_max, k, eps)
        for ri in radii[1:]:
            hit = grid.covering_value(ri, eps)
            ok = hit is not None
            violations += not ok
            rep.rows.append([t, "remaining", eps, ri, hit if ok else "none", int(ok)])
    rep.summary = {"trials": trials, "checks": len(rep.rows), "violations": violations}
    if timing:
        rep.summary["seconds"] = round(time.perf_counter() - t0, 3)
    return rep


def theoretical_micro(trials: int, seed: int, workers: int = 1, timing: bool = False) -> Report:
    """Theoretical mode on micro instances: n <= 6, k = 2, eps = 0.45."""
    return ratio_vs_oracle(trials, seed, eps=0.45, k=2, mode="theoretical", workers=workers,
                           timing=timing, n_max=6)


def planted_reconstruction(trials: int, seed: int, eps: float = 0.2, timing: bool = False,
                           repair: bool = True) -> Report:
    """Replay Selection on planted separated coverings with the recorded guess string.

    Checks per trial: selected points stay in their planted ball, output balls
    are pairwise disjoint, each planted ball's points lie in the matching
    output ball, cluster sizes respect the cap, and every recomputed ball
    grows the exact MEB radius by at least 1 + eps^2/16.
    """
    cols = ["trial", "k", "d", "n", "steps", "subset", "disjoint", "contain", "cap",
            "growth", "min_growth"]
    rep = Report("planted-reconstruction", cols)
    rng = np.random.default_rng(seed)
    cap = cluster_cap(eps)
    need = 1.0 + eps * eps / 16.0 - 1e-9
    tot = dict.fromkeys(["subset", "disjoint", "contain", "cap", "growth"], 0)
    worst = math.inf
    for t in range(trials):
        k = int(rng.integers(1, 4))
        d = int(rng.integers(2, 4))
        inst = planted_separated(rng, k, d, eps)
        P = inst.points
        u = record_guess_string(P, inst.covering, inst.guessed, eps)
        res = selection(P, k, u, inst.guessed, eps, repair=repair)
        labs = np.array(inst.labels)
        bad = dict.fromkeys(tot, 0)
        ming = math.inf
        for i in range(k):
            S = res.selected[i]
            bad["subset"] += any(labs[p] != i for p in S)
            bad["cap"] += len(S) > cap
            b = res.balls[i]
            content = np.flatnonzero(labs == i)
            bad["contain"] += b is None or not all(ball_contains(b, P[p]) for p in content)
            for m in range(3, len(S) + 1):
                prev = exact_meb(P[list(S[:m - 1])]).radius
                g = exact_meb(P[list(S[:m])]).radius / prev
                ming = min(ming, g)
                bad["growth"] += g < need
        bs = [b for b in res.balls if b is not None]
        bad["disjoint"] += sum(math.dist(bs[i].center, bs[j].center) <= bs[i].radius + bs[j].radius
                               for i in range(len(bs)) for j in range(i + 1, len(bs)))
        for key in tot:
            tot[key] += bad[key]
        worst = min(worst, ming)
        rep.rows.append([t, k, d, len(P), res.steps] + [bad[key] for key in tot]
                        + [ming if ming < math.inf else "-"])
    rep.summary = dict(trials=trials, violations=sum(tot.values()), **tot,
                       min_growth=worst, required_growth=1.0 + eps * eps / 16.0, size_cap=cap)
    return rep


def meb_quality(trials: int, seed: int, timing: bool = False, eps_list=(0.05, 0.2)) -> Report:
    """approx_meb against exact_meb on random sets with n <= 200, d <= 10."""
    cols = ["trial", "n", "d", "eps", "exact", "approx", "ratio", "enclosed"]
    rep = Report("meb", cols)
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    for t in range(trials):
        n = int(rng.integers(1, 201))
        d = int(rng.integers(1, 11))
        P = _random_points(rng, n, d)
        ex = exact_meb(P)
        for eps in eps_list:
            ap = approx_meb(P, eps)
            ratio = ap.radius / ex.radius if ex.radius > 0 else (1.0 if ap.radius == 0 else math.inf)
            enclosed = all(ball_contains(ap, p, 0.0) for p in P) and all(
                ball_contains(ex, p) for p in P)
            ok = enclosed and 1.0 - 1e-9 <= ratio <= 1.0 + eps
            violations += not ok
            worst = max(worst, ratio - 1.0)
            rep.rows.append([t, n, d, eps, ex.radius, ap.radius, ratio, int(enclosed)])
    rep.summary = {"trials": trials, "violations": violations, "max_excess": worst}
    return rep


def coreset_audit(trials: int, seed: int, eps: float = 0.5, timing: bool = False) -> Report:
    """Every subset C of P has a candidate in [cost(C), (1+eps) cost(C)]."""
    cols = ["trial", "n", "candidates", "subsets", "misses"]
    rep = Report("coreset-audit", cols)
    rng = np.random.default_rng(seed)
    violations = 0
    for t in range(trials):
        n = int(rng.integers(1, 13))
        P = _random_points(rng, n, int(rng.integers(1, 4)))
        cands = coreset_radius_candidates(P, eps)
        misses = 0
        for mask in range(1, 1 << n):
            C = [i for i in range(n) if mask >> i & 1]
            cost = exact_meb(P[C]).radius
            if cost == 0.0:
                ok = 0.0 in cands.values
            else:
                ok = cands.covering_value(cost, eps) is not None
            misses += not ok
        violations += misses
        rep.rows.append([t, n, len(cands), (1 << n) - 1, misses])
    rep.summary = {"trials": trials, "violations": violations}
    return rep


def random_fair_covering(rng: np.random.Generator, k: int, d: int = 2):
    """Random, possibly overlapping balls, each holding an exactly fair
    two-colored cluster of its own points. Returns (P, colors, covering, members)."""
    centers = rng.uniform(0.0, 4.0, size=(k, d))
    radii = rng.uniform(0.02, 1.0, size=k)
    pts, members, cols = [], [], []
    for i in range(k):
        m = 2 * int(rng.integers(1, 4))
        members.append(tuple(range(len(pts), len(pts) + m)))
        pts.extend(uniform_in_ball(rng, centers[i], radii[i], m))
        c = [0, 1] * (m // 2)
        rng.shuffle(c)
        cols += c
    balls = tuple(Ball(tuple(float(v) for v in centers[i]), float(radii[i])) for i in range(k))
    return np.array(pts), ColorTable(tuple(cols), ("0", "1")), Covering(balls), members


def sepbal_audit(trials: int, seed: int, timing: bool = False) -> Report:
    """separate_and_balance on random fair coverings with k <= 4."""
    cols = ["trial", "k", "eps", "gamma", "phases", "input_cost", "output_cost", "bound",
            "separated", "balanced", "covered", "fair"]
    rep = Report("sepbal-audit", cols)
    rng = np.random.default_rng(seed)
    violations = 0
    spec = ConstraintSpec.exact_fairness()
    for t in range(trials):
        k = int(rng.integers(1, 5))
        eps = float(rng.uniform(0.05, 0.5))
        gamma = gamma_of(eps) * (1.0 + eps if rng.random() < 0.5 else 1.0)
        P, colors, cov, members = random_fair_covering(rng, k)
        res = separate_and_balance(cov, gamma, eps, P, k=k, members=members)
        out = res.covering
        bound = (1.0 + eps) ** k * gamma ** (k - 1) * cov.cost + 1e-9
        sep = out.is_separated(gamma)
        bal = out.is_balanced(eps, k)
        covered = all(ball_contains(b, P[i]) for b, m in zip(out.balls, res.members) for i in m)
        fair = satisfies(res.members, colors, spec, len(P))
        ok = sep and bal and covered and fair and out.cost <= bound and res.phases <= k
        violations += not ok
        rep.rows.append([t, k, eps, gamma, res.phases, cov.cost, out.cost, bound,
                         int(sep), int(bal), int(covered), int(fair)])
    rep.summary = {"trials": trials, "violations": violations}
    return rep


def _sample_counts(rng, spec: ConstraintSpec, base) -> list:
    """Color counts of one random cluster satisfying ``spec`` (base = dataset proportions)."""
    kind = spec.kind
    if kind is Kind.LOWER_BOUND:
        size = spec.lower + int(rng.integers(0, 10))
        split = rng.multinomial(size, np.ones(len(base)) / len(base))
        return [int(v) for v in split]
    if kind is Kind.EXACT_FAIRNESS:
        m = int(rng.integers(1, 9))
        return [m * b for b in base]
    if kind is Kind.EXACT_BALANCE:
        m = int(rng.integers(1, 9))
        return [m] * len(base)
    if kind is Kind.MIN_BALANCE:
        hi = int(rng.integers(1, 30))
        b = spec.balance
        lo = int(rng.integers(-(-b.numerator * hi // b.denominator), hi + 1))
        return [lo, hi] if rng.random() < 0.5 else [hi, lo]
    tot = sum(base)
    while True:
        size = int(rng.integers(1, 40))
        cnt = [int(v) for v in rng.multinomial(size, [b / tot for b in base])]
        if _cluster_ok(cnt, size, spec, None, 0):
            return cnt


def merge_closure(trials: int, seed: int, timing: bool = False) -> Report:
    """Random merges of two disjoint satisfying clusters, per constraint family."""
    rng = np.random.default_rng(seed)
    base3 = [1, 2, 3]
    pool = 120  # points per base unit
    col3 = ColorTable(tuple(c for c, b in enumerate(base3) for _ in range(b * pool)),
                      ("a", "b", "c"))
    col2 = ColorTable(tuple([0] * 400 + [1] * 400), ("r", "b"))
    fam = [
        ("lower-bound", lambda: ConstraintSpec.lower_bound(int(rng.integers(1, 6))), col3),
        ("exact-fairness", ConstraintSpec.exact_fairness, col3),
        ("min-balance", lambda: ConstraintSpec.min_balance(
            Fraction(int(rng.integers(1, 5)), int(rng.integers(5, 9)))), col2),
        ("exact-balance", ConstraintSpec.exact_balance, col3),
        ("range-balance", lambda: ConstraintSpec.range_balance(
            *zip(*[(max(Fraction(0), Fraction(b, 6) - w), min(Fraction(1), Fraction(b, 6) + w))
                   for b in base3 for w in [Fraction(int(rng.integers(1, 20)), 100)]])), col3),
    ]
    rep = Report("merge-closure", ["family", "trials", "violations"])
    total_bad = 0
    for name, make, colors in fam:
        by_color = [[i for i, c in enumerate(colors.color_of) if c == h]
                    for h in range(colors.num_colors)]
        base = colors.counts(range(len(colors)))
        g = math.gcd(*base)
        base = [b // g for b in base]
        bad = 0
        for _ in range(trials):
            spec = make()
            ca, cb = _sample_counts(rng, spec, base), _sample_counts(rng, spec, base)
            A, B = [], []
            for h, idx in enumerate(by_color):
                pick = rng.permutation(len(idx))[:ca[h] + cb[h]]
                A += [idx[i] for i in pick[:ca[h]]]
                B += [idx[i] for i in pick[ca[h]:]]
            n = len(colors)
            assert cluster_satisfies(A, colors, spec, n) and cluster_satisfies(B, colors, spec, n)
            bad += not cluster_satisfies(merged(A, B), colors, spec, n)
        total_bad += bad
        rep.rows.append([name, trials, bad])
    rep.summary = {"trials": trials, "violations": total_bad}
    return rep


def capacity_counterexample(cap: int = 3):
    """Two clusters within a size cap whose union exceeds it: upper bounds are not mergeable."""
    A, B = tuple(range(cap)), tuple(range(cap, 2 * cap))
    ok = len(A) <= cap and len(B) <= cap
    return A, B, ok and len(merged(A, B)) > cap


def locality(trials: int = 1, seed: int = 0, timing: bool = False, workers: int = 1) -> Report:
    """Circle-plus-outside-point instance: the optimum keeps c1 alone although
    a circle point is closer to c1 than to its own cluster's center."""
    P, info = locality_instance()
    orc = exact_msr(P, 2, budget=max(partition_count(len(P), 2), 1))
    sol = solve(P, 2, 0.3, options=SolveOptions(workers=workers))
    want = {frozenset(info["circle"]), frozenset([info["c1"]])}
    got_o = {frozenset(c) for c in orc.clusters if c}
    got_s = {frozenset(c) for c in sol.clusters if c}
    centers = [exact_meb(P[list(c)]).center for c in orc.clusters if c]
    lab = {i: j for j, c in enumerate(c for c in orc.clusters if c) for i in c}
    nonlocal_pts = [i for i in range(len(P))
                    if min(range(len(centers)), key=lambda j: math.dist(P[i], centers[j])) != lab[i]]
    rep = Report("locality", ["oracle_cost", "solver_cost", "oracle_match", "solver_match",
                              "non_nearest_points"])
    rep.rows.append([orc.cost, sol.refined_cost, int(got_o == want), int(got_s == want),
                     " ".join(map(str, nonlocal_pts)) or "none"])
    ok = got_o == want and got_s == want and info["x"] in nonlocal_pts
    rep.summary = {"violations": int(not ok)}
    return rep


SUITES = {
    "ratio-vs-oracle": ratio_vs_oracle,
    "theoretical-micro": theoretical_micro,
    "planted-reconstruction": planted_reconstruction,
    "meb": meb_quality,
    "grid-covering": grid_covering,
    "lemma-interval": lemma_interval,
    "coreset-audit": coreset_audit,
    "sepbal-audit": sepbal_audit,
    "merge-closure": merge_closure,
    "locality": locality,
}
