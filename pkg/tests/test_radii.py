import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmsr.geometry import ResourceError, UsageError, exact_meb
from fairmsr.radii import (coreset_radius_candidates, coreset_size, geometric_grid,
                           largest_radius_candidates_kcenter, remaining_radii_candidates)


def test_geometric_grid_examples():
    assert geometric_grid(1, 1, 0.5).values == (1.0,)
    g = geometric_grid(1, 2, 0.5)
    assert g.values == pytest.approx((1, 1.5, 2.25))
    assert g.covering_value(1.8, 0.5) == pytest.approx(2.25)


def test_kcenter_grid_examples():
    g = largest_radius_candidates_kcenter(2, 2, 1, 1, 0.5)
    assert g.values == pytest.approx((1, 1.5, 2.25, 3.375, 5.0625))
    assert largest_radius_candidates_kcenter(1, 1, 1, 1, 1).values == (1.0,)
    g = largest_radius_candidates_kcenter(4, 2, 2, 2, 0.3)
    assert len(g) == 17
    assert g[0] == 2.0 and g[-1] == pytest.approx(2 * 1.3 ** 16)


def test_remaining_grid_examples():
    assert remaining_radii_candidates(1, 2, 0.5).values == pytest.approx(
        (0.25, 0.375, 0.5625, 0.84375, 1.265625))
    assert remaining_radii_candidates(1, 1, 0.5).values == pytest.approx((0.5, 0.75, 1.125))


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(1, 8), st.floats(0.01, 0.99))
def test_remaining_grid_reaches_r_max(r_max, k, eps):
    g = remaining_radii_candidates(r_max, k, eps)
    assert g[-1] >= r_max
    assert g[0] == pytest.approx(eps / k * r_max)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1.0, 1e3), st.floats(0.01, 2.0), st.floats(0, 1))
def test_grid_covers_interval(a, ratio, eps, t):
    b = a * ratio
    r = min(max(a * ratio ** t, a), b)
    hit = geometric_grid(a, b, eps).covering_value(r, eps)
    assert hit is not None and r <= hit <= (1 + eps) * r


def test_grid_argument_checks():
    with pytest.raises(UsageError):
        geometric_grid(0, 1, 0.5)
    with pytest.raises(UsageError):
        geometric_grid(2, 1, 0.5)
    with pytest.raises(UsageError):
        remaining_radii_candidates(1, 2, 1.5)


def test_coreset_examples():
    assert coreset_radius_candidates([(0, 0)], 0.5).values == (0.0,)
    c = coreset_radius_candidates([(0, 0), (2, 0)], 0.5)
    assert any(1 <= v <= 1.5 for v in c.values)
    sq = [(0, 0), (1, 0), (0, 1), (1, 1)]
    r = math.sqrt(2) / 2
    assert coreset_radius_candidates(sq, 0.5).covering_value(r, 0.5) is not None


def test_coreset_size_and_budget():
    assert coreset_size(0.5) == 3
    with pytest.raises(ResourceError):
        coreset_radius_candidates(np.random.default_rng(0).random((40, 2)), 0.1, budget=1000)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_coreset_soundness_small(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 8))
    P = rng.random((n, 2))
    eps = 0.5
    cands = coreset_radius_candidates(P, eps)
    for size in range(1, n + 1):
        for C in itertools.combinations(range(n), size):
            cost = exact_meb(P[list(C)]).radius
            if cost == 0:
                assert 0.0 in cands.values
            else:
                assert cands.covering_value(cost, eps) is not None
