import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import brute_lp, random_lp
from oraclegeom import config
from oraclegeom.geom import CommittedHalfspace, Hyperplane
from oraclegeom.lp import Infeasible, LpInstance, Optimal, Unbounded, UnsupportedDimension, lp_solve, max_slack_point


def hs(a, o, side=1):
    return CommittedHalfspace(Hyperplane(np.asarray(a, dtype=float), o), side)


def test_simplex_corner():
    cons = [hs([1, 0], 0), hs([0, 1], 0), hs([1, 1], 1, -1)]
    res = lp_solve(LpInstance(2, cons, objective=np.array([1.0, 1.0])), 0)
    assert isinstance(res, Optimal) and np.allclose(res.point, [0, 0], atol=1e-9)


def test_contradiction():
    res = lp_solve(LpInstance(2, [hs([1, 0], 1), hs([1, 0], 0, -1)]), 0)
    assert isinstance(res, Infeasible)


def test_dimension_limit():
    with pytest.raises(UnsupportedDimension):
        LpInstance(5, [])


def test_unbounded_without_box():
    res = lp_solve(LpInstance(2, [hs([1, 0], 0)], objective=np.array([0.0, 1.0]), box=None), 0)
    assert isinstance(res, Unbounded)
    res = lp_solve(LpInstance(2, [hs([1, 0], 0), hs([0, 1], 0)], objective=np.array([1.0, 1.0]), box=None), 0)
    assert isinstance(res, Optimal) and np.allclose(res.point, 0, atol=1e-9)


def test_fifty_halfplanes_match_brute_force(rng):
    p = rng.normal(size=2)
    A = rng.normal(size=(50, 2))
    o = A @ p - rng.uniform(0.1, 2, 50)
    cons = [hs(a, b) for a, b in zip(A, o)]
    c = rng.normal(size=2)
    res = lp_solve(LpInstance(2, cons, objective=c), 0)
    assert res.feasible
    assert abs(float(c @ res.point) - brute_lp(cons, c, 2, config.TOL.box)) <= 1e-6


@given(st.integers(0, 100_000))
def test_agrees_with_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    cons, c, d = random_lp(rng)
    res = lp_solve(LpInstance(d, cons, objective=c), seed)
    ref = brute_lp(cons, c, d, config.TOL.box)
    assert res.feasible == (ref is not None)
    if ref is not None:
        assert abs(float(c @ res.point) - ref) <= 1e-6
        for h in cons:
            assert h.side * h.plane.value(res.point) >= -config.TOL.side * 10


@given(st.integers(0, 100_000))
def test_permutation_and_seed_invariance(seed):
    rng = np.random.default_rng(seed)
    cons, _, d = random_lp(rng)
    a = lp_solve(LpInstance(d, cons), 0)
    perm = [cons[i] for i in rng.permutation(len(cons))]
    b = lp_solve(LpInstance(d, perm), seed + 1)
    assert a.feasible == b.feasible
    if a.feasible:
        assert np.allclose(a.point, b.point, atol=1e-9 * config.TOL.box)


def test_max_slack_point():
    cons = [hs([1, 0], 0), hs([0, 1], 0), hs([1, 1], 2, -1)]
    x, slack = max_slack_point(cons, 2)
    assert slack > 0.5
    for h in cons:
        assert h.side * h.plane.value(x) >= slack - 1e-9
    _, slack = max_slack_point([hs([1, 0], 1), hs([1, 0], 1, -1)], 2)
    assert slack <= config.TOL.side
