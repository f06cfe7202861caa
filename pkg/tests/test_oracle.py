import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmsr.constraints import ColorTable, ConstraintSpec, satisfies
from fairmsr.geometry import ResourceError, exact_meb
from fairmsr.instances import locality_instance, two_pairs
from fairmsr.oracle import DEFAULT_BUDGET, exact_msr, partition_count, stirling2

PAIRS = two_pairs()


def all_partitions(items, k):
    """Every set partition of ``items`` into at most k blocks (naive recursion)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        if len(part) < k:
            yield [[first]] + part


def naive_optimum(P, k, colors=None, spec=None, z=0):
    spec = spec or ConstraintSpec.unconstrained()
    n = len(P)
    best = math.inf
    for t in range(z + 1):
        for out in itertools.combinations(range(n), t):
            keep = [i for i in range(n) if i not in out]
            for part in all_partitions(keep, k):
                if not satisfies(part, colors, spec, n):
                    continue
                best = min(best, math.fsum(exact_meb(P[b]).radius for b in part))
    return best


def test_examples():
    assert exact_msr([(0, 0), (2, 0)], 2).cost == 0.0
    res = exact_msr(PAIRS, 2)
    assert res.cost == pytest.approx(1.0)
    assert sorted(res.clusters) == [(0, 1), (2, 3)]
    cols = ColorTable((0, 1, 0, 1), ("red", "blue"))
    fair = exact_msr(PAIRS, 2, cols, ConstraintSpec.exact_fairness())
    assert fair.cost == pytest.approx(1.0)
    assert sorted(fair.clusters) == [(0, 1), (2, 3)]


def test_fair_two_pairs_same_colors_prefers_one_cluster():
    cols = ColorTable((0, 0, 1, 1), ("red", "blue"))
    res = exact_msr(PAIRS, 2, cols, ConstraintSpec.exact_fairness())
    assert res.cost == pytest.approx(50.5)
    assert res.clusters == ((0, 1, 2, 3), ())


def test_infeasible():
    res = exact_msr(PAIRS, 2, spec=ConstraintSpec.lower_bound(5))
    assert not res.feasible and res.cost == math.inf


def test_counts():
    assert stirling2(4, 2) == 7
    assert partition_count(4, 2) == 8          # 1 + 7
    assert partition_count(3, 1, z=1) == 1 + 3  # drop nothing or one point
    assert partition_count(12, 2) <= DEFAULT_BUDGET < partition_count(13, 2)


def test_budget_guard(monkeypatch):
    with pytest.raises(ResourceError):
        exact_msr(np.random.default_rng(0).random((13, 2)), 2)
    monkeypatch.setenv("FAIR_MSR_BUDGET", "3")
    with pytest.raises(ResourceError):
        exact_msr(PAIRS, 2)


def test_locality_witness():
    P, info = locality_instance()
    res = exact_msr(P, 2, budget=partition_count(len(P), 2))
    assert {frozenset(c) for c in res.clusters} == {frozenset(info["circle"]),
                                                    frozenset([info["c1"]])}
    centers = [exact_meb(P[list(c)]).center for c in res.clusters]
    home = 0 if info["x"] in res.clusters[0] else 1
    x = P[info["x"]]
    assert math.dist(x, centers[1 - home]) < math.dist(x, centers[home])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_matches_naive_enumeration(seed, k):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    P = rng.random((n, 2))
    cols = ColorTable(tuple(int(c) for c in rng.integers(0, 2, size=n)), ("a", "b"))
    for spec, colors, z in [(ConstraintSpec.unconstrained(), None, 0),
                            (ConstraintSpec.lower_bound(2), None, 0),
                            (ConstraintSpec.min_balance(0.5), cols, 0),
                            (ConstraintSpec.with_outliers(1), None, 1)]:
        if spec.needs_colors and len(set(cols.color_of)) < 2:
            continue
        res = exact_msr(P, k, colors, spec)
        want = naive_optimum(P, k, colors, spec, z)
        if want == math.inf:
            assert not res.feasible
        else:
            assert res.cost == pytest.approx(want, rel=1e-12, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_pruning_does_not_change_result_and_k_is_monotone(seed):
    rng = np.random.default_rng(seed)
    P = rng.random((int(rng.integers(1, 8)), 2))
    a = exact_msr(P, 2)
    b = exact_msr(P, 2, prune=False)
    assert a.cost == b.cost and a.clusters == b.clusters
    assert exact_msr(P, 3).cost <= a.cost + 1e-12
