from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmsr import bench
from fairmsr.constraints import (ColorTable, ConstraintSpec, Kind, balance, cluster_satisfies,
                                 merged, parse_constraint, satisfies, validate_colors)
from fairmsr.geometry import UsageError

R, B = 0, 1


def table(cols):
    return ColorTable(tuple(cols), ("red", "blue"))


def test_exact_fairness_examples():
    c = table([R, R, B, B])
    spec = ConstraintSpec.exact_fairness()
    assert satisfies([{0, 2}, {1, 3}], c, spec)
    assert not satisfies([{0, 1}, {2, 3}], c, spec)


def test_min_balance_example():
    c = table([R, R, R, B])
    assert balance([0, 1, 2, 3], c) == Fraction(1, 3)
    assert not satisfies([{0, 1, 2, 3}], c, ConstraintSpec.min_balance(0.5))
    assert satisfies([{0, 1, 2, 3}], c, ConstraintSpec.min_balance(Fraction(1, 3)))


def test_lower_bound_example():
    assert not satisfies([set(range(3)), set(range(3, 8))], None, ConstraintSpec.lower_bound(4))
    assert satisfies([set(range(4)), set(range(4, 8))], None, ConstraintSpec.lower_bound(4))


def test_outliers_example():
    spec = ConstraintSpec.with_outliers(1)
    assert satisfies([{0, 1}, {2, 3}], None, spec, n=5)
    assert not satisfies([{0, 1}, {2}], None, spec, n=5)


def test_uncovered_point_fails_without_outliers():
    assert not satisfies([{0, 1}], None, ConstraintSpec.unconstrained(), n=3)


def test_overlapping_clusters_rejected():
    with pytest.raises(UsageError):
        satisfies([{0, 1}, {1, 2}], None, ConstraintSpec.unconstrained(), n=3)


@pytest.mark.parametrize("a,b,want", [
    ({1, 2}, {3}, {1, 2, 3}),
    (set(), {5}, {5}),
    ({0, 4}, {2, 6}, {0, 2, 4, 6}),
])
def test_merged_examples(a, b, want):
    assert merged(a, b) == want


def test_merged_rejects_overlap():
    with pytest.raises(UsageError):
        merged({1, 2}, {2, 3})


def test_empty_cluster_is_vacuous():
    c = ColorTable((0, 1, 2), ("a", "b", "c"))
    for spec in (ConstraintSpec.exact_fairness(), ConstraintSpec.exact_balance(),
                 ConstraintSpec.lower_bound(3),
                 ConstraintSpec.range_balance([0.5, 0.5, 0.5], [0.6, 0.6, 0.6])):
        assert cluster_satisfies([], c, spec)


def test_range_balance_bounds():
    c = ColorTable((0, 0, 1, 1, 1, 1), ("a", "b"))
    spec = ConstraintSpec.range_balance([Fraction(1, 4), Fraction(1, 2)],
                                        [Fraction(1, 2), Fraction(3, 4)])
    assert cluster_satisfies([0, 2, 3], c, spec)        # 1/3, 2/3
    assert not cluster_satisfies([2, 3], c, spec)       # 0 red


@pytest.mark.parametrize("text,kind", [
    ("none", Kind.UNCONSTRAINED), ("lower-bound:3", Kind.LOWER_BOUND),
    ("outliers:2", Kind.OUTLIERS), ("exact-fairness", Kind.EXACT_FAIRNESS),
    ("min-balance:1/2", Kind.MIN_BALANCE), ("min-balance:0.25", Kind.MIN_BALANCE),
    ("exact-balance", Kind.EXACT_BALANCE),
])
def test_parse_constraint(text, kind):
    spec = parse_constraint(text)
    assert spec.kind is kind
    assert parse_constraint(spec.describe()) == spec


@pytest.mark.parametrize("text", ["bogus", "lower-bound:x", "min-balance:2", "outliers:-1",
                                  "range-balance"])
def test_parse_constraint_rejects(text):
    with pytest.raises(UsageError):
        parse_constraint(text)


def test_validate_colors():
    with pytest.raises(UsageError):
        validate_colors(None, ConstraintSpec.exact_fairness(), 3)
    with pytest.raises(UsageError):
        validate_colors(ColorTable((0, 1, 2), ("a", "b", "c")), ConstraintSpec.min_balance(0.5), 3)
    validate_colors(None, ConstraintSpec.lower_bound(2), 3)


def test_capacity_is_not_mergeable():
    A, B_, broken = bench.capacity_counterexample(3)
    assert len(A) <= 3 and len(B_) <= 3 and broken


colorings = st.lists(st.integers(0, 1), min_size=2, max_size=12).filter(lambda c: len(set(c)) == 2)


@settings(max_examples=150, deadline=None)
@given(colorings, st.data())
def test_exact_fairness_invariant_under_replication(cols, data):
    n = len(cols)
    labels = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    clusters = [[i for i in range(n) if labels[i] == j] for j in range(3)]
    c = table(cols)
    spec = ConstraintSpec.exact_fairness()
    want = satisfies(clusters, c, spec)
    for m in (2, 3):
        rep = c.replicate(m)
        big = [[i * m + t for i in cl for t in range(m)] for cl in clusters]
        assert satisfies(big, rep, spec) == want


@settings(max_examples=150, deadline=None)
@given(colorings, st.data(), st.fractions(0, 1))
def test_min_balance_symmetric_in_colors(cols, data, b):
    n = len(cols)
    labels = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    clusters = [[i for i in range(n) if labels[i] == j] for j in range(3)]
    spec = ConstraintSpec.min_balance(b)
    swapped = table([1 - v for v in cols])
    assert satisfies(clusters, table(cols), spec) == satisfies(clusters, swapped, spec)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=30), st.data())
def test_exact_fairness_matches_fraction_proportions(cols, data):
    # independent check with proportions compared as reduced fractions
    n = len(cols)
    c = ColorTable(tuple(cols), ("a", "b", "c"))
    cl = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    want = all(Fraction(sum(cols[i] == h for i in cl), len(cl)) == Fraction(cols.count(h), n)
               for h in range(3))
    assert cluster_satisfies(cl, c, ConstraintSpec.exact_fairness()) == want


def test_merge_closure_short_campaign():
    rep = bench.merge_closure(300, seed=5)
    assert rep.summary["violations"] == 0


def test_color_table_interns_labels_in_first_use_order():
    c = ColorTable.from_labels(["blue", "red", "blue"])
    assert c.labels == ("blue", "red") and c.color_of == (0, 1, 0)
    assert c.counts([0, 1, 2]) == [2, 1]
    assert np.array_equal(c.replicate(2).color_of, (0, 0, 1, 1, 0, 0))
