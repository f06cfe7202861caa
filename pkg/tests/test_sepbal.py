import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmsr import bench
from fairmsr.geometry import Ball, UsageError
from fairmsr.instances import planted_separated, two_pairs
from fairmsr.sepbal import Covering, record_guess_string, separate_and_balance
from fairmsr.solver import cluster_cap, gamma_of, selection


def test_single_ball_unchanged():
    cov = Covering((Ball((0.0, 0.0), 1.0),))
    res = separate_and_balance(cov, 2.0, 0.5, [(0, 0), (0.5, 0)])
    assert res.covering.balls == cov.balls and res.phases == 0


def test_close_balls_merge():
    cov = Covering((Ball((0.0, 0.0), 1.0), Ball((1.5, 0.0), 1.0)))
    res = separate_and_balance(cov, 1.0, 0.5, [(0, 0), (1.5, 0)])
    (b,) = res.covering.balls
    assert b.center == pytest.approx((0.75, 0.0))
    assert b.radius == pytest.approx(1.75)
    assert b.radius <= 1.0 * (2 * 1 + 2 * 1)
    assert res.members == ((0, 1),)


def test_small_ball_raised():
    cov = Covering((Ball((0.0, 0.0), 1.0), Ball((10.0, 0.0), 0.001)))
    res = separate_and_balance(cov, 1.0, 0.5, [(0, 0), (10, 0)], k=2)
    assert [b.radius for b in res.covering.balls] == pytest.approx([1.0, 0.25])
    assert res.covering.balls[1].center == (10.0, 0.0)


def test_argument_checks():
    with pytest.raises(UsageError):
        separate_and_balance(Covering(()), 1.0, 0.5, [(0, 0)])
    with pytest.raises(UsageError):
        separate_and_balance(Covering((Ball((0.0,), 1.0),)), 0.5, 0.5, [(0,)])


def test_guess_string_two_pairs():
    P = two_pairs()
    cov = Covering((Ball((0.5, 0.0), 0.5), Ball((100.5, 0.0), 0.5)))
    assert record_guess_string(P, cov, [0.5, 0.5], 0.2) == (1, 1, 2, 2)


def test_guess_string_single_ball():
    P = np.random.default_rng(1).random((7, 2))
    cov = Covering((Ball((0.5, 0.5), 1.0),))
    u = record_guess_string(P, cov, [1.0], 0.2)
    assert set(u) == {1} and len(u) <= min(len(P), cluster_cap(0.2))


def test_guess_string_lone_point_cluster():
    P = [(0, 0), (0.2, 0), (0.1, 0.1), (50, 0)]
    cov = Covering((Ball((0.1, 0.0), 0.2), Ball((50.0, 0.0), 0.1)))
    u = record_guess_string(P, cov, [0.2, 0.1], 0.2)
    assert u.count(2) == 1


def test_guess_string_rejects_overlap():
    cov = Covering((Ball((0.0, 0.0), 1.0), Ball((0.5, 0.0), 1.0)))
    with pytest.raises(UsageError):
        record_guess_string([(0.2, 0)], cov, [1.0, 1.0], 0.2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_sepbal_properties(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 5))
    eps = float(rng.uniform(0.05, 0.5))
    gamma = (1 + eps) * gamma_of(eps)
    P, colors, cov, members = bench.random_fair_covering(rng, k)
    res = separate_and_balance(cov, gamma, eps, P, k=k, members=members)
    out = res.covering
    assert res.phases <= k
    assert out.is_separated(gamma) and out.is_balanced(eps, k)
    assert out.cost <= (1 + eps) ** k * gamma ** (k - 1) * cov.cost + 1e-9
    assert out.covers(P)
    assert sorted(i for m in res.members for i in m) == list(range(len(P)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_covers_planted_balls(seed):
    rng = np.random.default_rng(seed)
    eps = 0.2
    k = int(rng.integers(1, 4))
    inst = planted_separated(rng, k, 2, eps)
    u = record_guess_string(inst.points, inst.covering, inst.guessed, eps)
    res = selection(inst.points, k, u, inst.guessed, eps, repair=True)
    labs = np.array(inst.labels)
    for i in range(k):
        assert all(res.balls[i].contains(inst.points[p]) for p in np.flatnonzero(labs == i))
    for i in range(k):
        for j in range(i + 1, k):
            bi, bj = res.balls[i], res.balls[j]
            assert math.dist(bi.center, bj.center) > bi.radius + bj.radius
