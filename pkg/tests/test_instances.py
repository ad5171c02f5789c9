import json

import numpy as np
import pytest

from oraclegeom.instances import (GenerationError, SchemaError, chain_capacity, gen_chain, gen_kdisks,
                                  gen_ktriangles, gen_terrain, gen_ulp, generate, ground_truth, loads,
                                  planted_membership)
from oraclegeom.geom import CommittedHalfspace
from oraclegeom.lp import LpInstance, lp_solve
from oraclegeom.oracles import UlpOracle, reveal


@pytest.mark.parametrize("kind, params", [("ulp", {"n": 30, "dim": 2}), ("ulp", {"n": 20, "dim": 3, "feasible": False}),
                                          ("kdisks", {"n": 50, "k": 3}), ("ktriangles", {"n": 50, "k": 2}),
                                          ("terrain", {"n": 60, "k": 2}), ("chain", {"n": 10})])
def test_deterministic_and_roundtrip(kind, params):
    a = generate(kind, seed=4, **params)
    b = generate(kind, seed=4, **params)
    assert a.dumps() == b.dumps()
    c = loads(a.dumps())
    assert c.to_dict() == json.loads(a.dumps())
    assert c.n == params["n"]


def test_seeds_differ():
    assert gen_kdisks(40, 2, seed=0).dumps() != gen_kdisks(40, 2, seed=1).dumps()


def test_planted_ulp_point_and_core():
    inst = gen_ulp(50, 2, True, 0)
    assert UlpOracle(ground_truth(inst)).separation(inst.hidden["planted_point"]) is None
    bad = gen_ulp(50, 3, False, 0)
    core = bad.hidden["core"]
    assert len(core) == 4
    gt = ground_truth(bad)
    with reveal():
        sides = gt.sides
    hs = [CommittedHalfspace(bad.planes[i], int(sides[i])) for i in core]
    assert not lp_solve(LpInstance(3, hs), 0).feasible


def test_planted_regions_match_colors():
    for inst in (gen_kdisks(200, 3, 0.05, 2), gen_ktriangles(200, 3, 0.02, 2)):
        region = planted_membership(inst)
        colors = np.asarray(inst.hidden["colors"])
        assert (region >= 0).all()
        for r in np.unique(region):
            assert len(set(colors[region == r])) == 1


def test_terrain_noise_within_eps():
    inst = gen_terrain(300, 3, 0.1, 1)
    assert len(inst.hidden["heights"]) == 300
    assert (planted_membership(inst) >= 0).all()


def test_chain_layout():
    inst = gen_chain(8)
    P = inst.points
    assert inst.hidden["colors"] == [0] + [1] * 7
    assert np.all(P[1:, 0] < 0) and np.all(P[:, 1] == 0)
    with pytest.raises(GenerationError):
        gen_chain(chain_capacity() + 1)
    with pytest.raises(GenerationError):
        gen_chain(1)


@pytest.mark.parametrize("text", ["not json", "[]", '{"kind": "ulp"}',
                                  '{"kind": "blob", "seed": 0, "params": {}, "public": {}, "hidden": {}}',
                                  '{"kind": "kdisks", "seed": 0, "params": {}, "public": {"points": [[0, 0]]},'
                                  ' "hidden": {"colors": [0, 1]}}',
                                  '{"kind": "kdisks", "seed": 0, "params": {}, "public": {"points": [[0, 0, 0]]},'
                                  ' "hidden": {"colors": [0]}}',
                                  '{"kind": "kdisks", "seed": 0, "version": 9, "params": {}, "public": {}, "hidden": {}}'])
def test_schema_errors(text):
    with pytest.raises(SchemaError):
        loads(text)


def test_unknown_generator():
    with pytest.raises(GenerationError):
        generate("blob")
