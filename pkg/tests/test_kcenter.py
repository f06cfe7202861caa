import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmsr.constraints import ColorTable, ConstraintSpec, Kind
from fairmsr.kcenter import (KCenterResult, constrained_kcenter_plugin, gonzalez,
                             register_kcenter, registered_kinds, unregister_kcenter)
from fairmsr.oracle import brute_force_kcenter

SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]
PAIRS = [(0, 0), (1, 0), (100, 0), (101, 0)]


def test_gonzalez_examples():
    assert gonzalez([(0, 0)], 1).value == 0
    sq = gonzalez(SQUARE, 2)
    assert sq.value == pytest.approx(1.0) and sq.centers == (0, 3)
    assert gonzalez(PAIRS, 2).value == pytest.approx(1.0)


def test_plugin_dispatch():
    P = np.array(PAIRS, dtype=float)
    res = constrained_kcenter_plugin(P, 2, None, ConstraintSpec.unconstrained())
    assert res is not None and res.factor == 2 and res.value == pytest.approx(1.0)
    cols = ColorTable((0, 1, 0, 1), ("r", "b"))
    assert constrained_kcenter_plugin(P, 2, cols, ConstraintSpec.exact_fairness()) is None
    assert constrained_kcenter_plugin(P, 2, None, ConstraintSpec.lower_bound(2)) is None


def test_register_and_unregister():
    def fake(P, k, colors, spec):
        return KCenterResult((0,), 5.0, 3.0)

    assert Kind.LOWER_BOUND not in registered_kinds()
    register_kcenter(Kind.LOWER_BOUND, fake)
    try:
        res = constrained_kcenter_plugin(PAIRS, 2, None, ConstraintSpec.lower_bound(2))
        assert res.value == 5.0 and res.factor == 3.0
    finally:
        unregister_kcenter(Kind.LOWER_BOUND)
    assert Kind.LOWER_BOUND not in registered_kinds()


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_two_approximation_and_feasibility(seed, k):
    rng = np.random.default_rng(seed)
    P = rng.random((int(rng.integers(1, 11)), int(rng.integers(1, 4))))
    res = gonzalez(P, k)
    assert res.value <= 2 * brute_force_kcenter(P, k) + 1e-9
    D = np.linalg.norm(P[:, None] - P[list(res.centers)][None], axis=2)
    assert np.all(D.min(axis=1) <= res.value + 1e-9)


def test_ties_go_to_lowest_index():
    # (1,0) and (-1,0) are equally far from the first center
    assert gonzalez([(0, 0), (1, 0), (-1, 0)], 2).centers == (0, 1)
