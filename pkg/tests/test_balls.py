import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import disk_family_brute, planted_disk
from oraclegeom.balls import (AssumptionViolation, LiftedPlanes, canonical_disk_sets, learn_k_ball_cover,
                              learn_single_ball, mono_ball_search)
from oraclegeom.instances import gen_chain, gen_kdisks, ground_truth
from oraclegeom.lift import Ball
from oraclegeom.oracles import ColoredGroundTruth, Color, ProximityOracle, reveal


def prox_of(points, colors):
    return ProximityOracle(ColoredGroundTruth(points, colors))


# ---------------------------------------------------------------- single ball


def test_single_ball_two_points():
    P = np.array([[0.0, 0.0], [5.0, 0.0]])
    ball, labels = learn_single_ball(P, prox_of(P, [0, 1]), rng_seed=0)
    assert labels.tolist() == [0, 1]
    assert ball.contains(P).tolist() == [True, False]


def test_single_ball_all_red():
    P = np.random.default_rng(0).normal(size=(20, 2))
    ball, labels = learn_single_ball(P, prox_of(P, [0] * 20), rng_seed=0)
    assert (labels == 0).all() and ball.contains(P).all()


def test_single_ball_planted_envelope():
    n = 200
    worst = 0
    for seed in range(100):
        P, cols = planted_disk(n, seed)
        prox = prox_of(P, cols)
        _, labels = learn_single_ball(P, prox, rng_seed=seed)
        assert np.array_equal(labels, cols)
        worst = max(worst, prox.ledger.total("NN", "FN"))
    assert worst <= 4 * math.log2(n) * math.log2(n ** 3)


def test_single_ball_assumption_violation():
    P = np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(AssumptionViolation):
        learn_single_ball(P, prox_of(P, [0, 1, 0]), rng_seed=0)


# ---------------------------------------------------------------- canonical sets


def subsets(sample):
    return {f.subset for f in canonical_disk_sets(sample)}


def test_canonical_small_examples():
    assert subsets(np.array([[0.3, 0.7]])) == {(), (0,)}
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]])
    assert len(subsets(tri)) == 8


def test_canonical_concyclic_interleaved_pairs_absent():
    sq = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    fam = subsets(sq)
    assert (0, 2) not in fam and (1, 3) not in fam
    assert fam == disk_family_brute(sq)


def test_canonical_soundness(rng):
    S = rng.normal(size=(9, 2))
    for f in canonical_disk_sets(S):
        if f.subset:
            assert tuple(np.flatnonzero(f.disk.contains(S)).tolist()) == f.subset


@settings(max_examples=30)
@given(st.integers(1, 7), st.integers(0, 10_000))
def test_canonical_complete_vs_brute_force(m, seed):
    S = np.random.default_rng(seed).uniform(-1, 1, size=(m, 2))
    assert disk_family_brute(S) <= subsets(S)


def test_canonical_grid_points_complete():
    # collinear and cocircular inputs
    S = np.array(list(itertools.product([0.0, 1.0, 2.0], [0.0, 1.0])))
    assert disk_family_brute(S) <= subsets(S)


# ---------------------------------------------------------------- mono-ball search


@pytest.mark.parametrize("strategy", ["implicit-centerpoint", "counterexample-loop"])
def test_mono_single_required(strategy):
    P = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, -7.0]])
    res = mono_ball_search([0], P, prox_of(P, [0, 1, 1]), Color.RED, strategy, rng_seed=0)
    assert res.found and res.ball.contains(P).tolist() == [True, False, False]


@pytest.mark.parametrize("strategy", ["implicit-centerpoint", "counterexample-loop"])
def test_mono_blocked_by_segment(strategy):
    P = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
    res = mono_ball_search([0, 1], P, prox_of(P, [0, 0, 1]), Color.RED, strategy, rng_seed=0)
    assert not res.found
    assert set(res.blocking) == {0, 1}


def test_mono_planted_cluster():
    rng = np.random.default_rng(5)
    reds = rng.normal(scale=0.2, size=(30, 2))
    ang = rng.uniform(0, 2 * np.pi, 100)
    blues = np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(1.5, 3, (100, 1))
    P = np.vstack([reds, blues])
    cols = [0] * 30 + [1] * 100
    res = mono_ball_search(np.arange(30), P, prox_of(P, cols), Color.RED, rng_seed=0)
    assert res.found
    inside = res.ball.contains(P)
    assert inside[:30].all() and not inside[30:].any()


def test_chain_loop_is_linear():
    for n in (4, 8, 16):
        inst = gen_chain(n)
        prox = ProximityOracle(ground_truth(inst))
        res = mono_ball_search([0], inst.points, prox, Color.RED, "counterexample-loop")
        assert res.found and res.iterations == n


def test_lifted_gap_matches_distance(rng):
    P = rng.normal(size=(30, 2))
    L = LiftedPlanes(P)
    c, r = rng.normal(size=2), 1.3
    w = np.append(2 * c, r * r - c @ c)
    for i in range(len(P)):
        assert L.gap(i, w) == pytest.approx(r * r - ((P[i] - c) ** 2).sum(), abs=1e-9)


# ---------------------------------------------------------------- k-ball cover


def test_k1_matches_single_ball():
    P, cols = planted_disk(150, 3, 0.05)
    prox = prox_of(P, np.zeros(len(P), dtype=int))
    cover = learn_k_ball_cover(P, 1, prox, rng_seed=0)
    assert (cover.labels == 0).all() and len(cover.balls) >= 1


@pytest.mark.parametrize("seed", range(3))
def test_k3_planted_labels_exact(seed):
    inst = gen_kdisks(300, 3, 0.05, seed)
    gt = ground_truth(inst)
    prox = ProximityOracle(gt)
    cover = learn_k_ball_cover(inst.points, 3, prox, rng_seed=seed)
    with reveal():
        truth = gt.colors
    assert np.array_equal(cover.labels, truth)
    for ball, col in cover.balls:
        assert (truth[ball.contains(inst.points)] == col).all()
    assert sum(e.get("accepted", False) for e in cover.log) == len(cover.balls)


def test_k_cover_assumption_violation():
    # alternating colors on a line: every ball holding two same-colored points holds the other color too,
    # so only singleton balls exist and an iteration cap of 1 trips on the first miss
    x = np.linspace(0, 1, 40)
    P = np.column_stack([x, np.zeros_like(x)])
    prox = prox_of(P, np.arange(40) % 2)
    with pytest.raises(AssumptionViolation):
        learn_k_ball_cover(P, 1, prox, rng_seed=0, max_failures=1)
