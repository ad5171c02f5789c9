import numpy as np
import pytest
from hypothesis import given, strategies as st

from oraclegeom.geom import ContractError
from oraclegeom.lift import Ball, DegenerateBall, lift_ball, lift_point, lift_points, unlift

coord = st.floats(-5, 5, allow_nan=False)


@pytest.mark.parametrize("c, r, w", [((0, 0), 1, (0, 0, 1)), ((1, 2), 2, (2, 4, -1)), ((0, 0), 0, (0, 0, 0))])
def test_lift_ball_examples(c, r, w):
    assert np.allclose(lift_ball(Ball(np.array(c, float), r)), w)


def test_lift_point_examples():
    h = lift_point((0.0, 0.0))
    # z = 0: normal along the lifted z axis, offset 0
    assert np.allclose(np.abs(h.normal), [0, 0, 1]) and h.offset == 0
    h = lift_point((1.0, 0.0))
    # plane x + z = 1 (unit normalized)
    assert np.allclose(h.normal * np.sqrt(2), [1, 0, 1]) and np.isclose(h.offset * np.sqrt(2), 1)
    w = lift_ball(Ball(np.array([1.0, 2.0]), 2.0))
    assert abs(h.value(w)) < 1e-12


def test_unlift_examples():
    b = unlift((0, 0, 1))
    assert isinstance(b, Ball) and np.allclose(b.center, 0) and np.isclose(b.radius, 1)
    b = unlift((2, 4, -1))
    assert np.allclose(b.center, [1, 2]) and np.isclose(b.radius, 2)
    assert isinstance(unlift((0, 0, -1)), DegenerateBall)
    assert not unlift((0, 0, -1)).contains(np.zeros((3, 2))).any()


def test_dimension_limits():
    with pytest.raises(ContractError):
        lift_point((1.0,))
    with pytest.raises(ContractError):
        Ball(np.zeros(2), -1.0)


@given(st.tuples(coord, coord), st.floats(0, 5), st.tuples(coord, coord))
def test_above_plane_iff_inside(c, r, q):
    b = Ball(np.array(c), r)
    w = lift_ball(b)
    d2 = float(((np.array(q) - np.array(c)) ** 2).sum())
    val = lift_point(q).value(w)
    if abs(d2 - r * r) > 1e-6:
        assert (val >= 0) == (d2 <= r * r)


@given(st.tuples(coord, coord, coord), st.floats(0, 5))
def test_unlift_inverts_lift_3d(c, r):
    b = unlift(lift_ball(Ball(np.array(c), r)))
    assert np.allclose(b.center, c) and abs(b.radius - r) <= 1e-6


def test_lifted_containment_survives_huge_radius():
    q = np.array([[0.3, 0.1], [0.3, 0.2]])
    # a disk of radius ~1e6 whose boundary passes between the two points
    c = np.array([0.3, 0.15 - 1e6])
    w = np.append(2 * c, 1e12 - c @ c)
    b = unlift(w)
    assert b.contains(q).tolist() == [True, False]


def test_lift_points_normalized(rng):
    P = rng.normal(size=(10, 2))
    N, o = lift_points(P)
    assert np.allclose(np.linalg.norm(N, axis=1), 1)
    for p, n, off in zip(P, N, o):
        h = lift_point(p)
        assert np.allclose(h.normal, n) and np.isclose(h.offset, off)
