import json
import math

import numpy as np
import pytest

from oraclegeom.geom import ContractError, Triangle2, triangles_contain
from oraclegeom.instances import gen_terrain, ground_truth
from oraclegeom.oracles import TerrainOracle, reveal
from oraclegeom.terrain import (Triangle3, assemble_terrain, read_xyz, simplify_terrain, write_mesh)
from oraclegeom.triangles import CoverAssumptionViolation


def T3(a, b, c, plane=(0, 0, 0)):
    return Triangle3(Triangle2(a, b, c), np.array(plane, float))


def union_grid(cover, res=400):
    V = np.array([t.base.vertices for t in cover])
    lo, hi = V.reshape(-1, 2).min(axis=0), V.reshape(-1, 2).max(axis=0)
    xs = np.linspace(lo[0], hi[0], res)
    ys = np.linspace(lo[1], hi[1], res)
    G = np.array(np.meshgrid(xs, ys)).reshape(2, -1).T
    return G, triangles_contain(V, G).any(axis=0)


def test_assemble_single_and_disjoint():
    one = [T3((0, 0), (1, 0), (0, 1), (1, 2, 3))]
    mesh = assemble_terrain(one)
    assert len(mesh) == 1 and mesh.assignment == [0]
    assert mesh.projected_area() == pytest.approx(0.5)
    two = one + [T3((5, 5), (6, 5), (5, 6))]
    mesh = assemble_terrain(two)
    assert len(mesh) == 2 and mesh.assignment == [0, 1]
    assert assemble_terrain([]).faces == []


def test_assemble_overlap_lowest_index():
    a = T3((0, 0), (2, 0), (0, 2), (0, 0, 1))
    b = T3((0.5, 0.5), (3, 0.5), (0.5, 3), (0, 0, 2))
    mesh = assemble_terrain([a, b])
    # interior-disjoint: areas add up to the union area
    G, covered = union_grid([a, b])
    assert mesh.projected_area() == pytest.approx(a.base.area + b.base.area - 0.5, rel=1e-9)
    # overlap point is assigned to the lower index
    f = mesh.locate([[0.7, 0.7]])[0]
    assert mesh.assignment[f] == 0 and mesh.faces[f].height([0.7, 0.7])[0] == pytest.approx(1)
    f = mesh.locate([[2.0, 0.8]])[0]
    assert mesh.assignment[f] == 1
    # every grid point in the union lies in exactly one face interior (or on shared edges)
    inside = triangles_contain(np.array([fc.base.vertices for fc in mesh.faces]), G[covered])
    assert inside.any(axis=0).all()


def test_coplanar_exact():
    rng = np.random.default_rng(0)
    xy = rng.uniform(-1, 1, size=(150, 2))
    z = 0.3 * xy[:, 0] - 0.7 * xy[:, 1] + 2
    res = simplify_terrain(np.column_stack([xy, z]), 1, 0.0, rng_seed=0)
    err = res.mesh.vertical_errors(np.column_stack([xy, z]))
    assert np.all(err <= 1e-7)
    # one-point leftover probes carry an arbitrary plane through their point
    for t in res.cover:
        if t.base.area > 1e-9:
            assert np.allclose(t.plane, [0.3, -0.7, 2], atol=1e-6)


def test_duplicate_xy_violates_assumption():
    P = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(CoverAssumptionViolation):
        simplify_terrain(P, 1, 0.4, rng_seed=0, max_failures=3)


@pytest.mark.parametrize("seed", range(2))
def test_planted_terrain(seed):
    eps = 0.1
    inst = gen_terrain(400, 3, eps, seed)
    gt = ground_truth(inst)
    res = simplify_terrain(TerrainOracle(gt), 3, eps, rng_seed=seed)
    with reveal():
        z = gt.heights
    xyz = np.column_stack([inst.points, z])
    assert res.mesh.vertical_errors(xyz).max() <= eps + 1e-9
    assert len(res.cover) <= 6 * 3 * math.log2(400)
    for t in res.cover:
        inside = t.base.contains(inst.points)
        assert np.all(np.abs(z[inside] - t.height(inst.points[inside])) <= eps + 1e-9)


def test_rejects_bad_input():
    with pytest.raises(ContractError):
        simplify_terrain(np.zeros((3, 2)), 1, 0.1)
    with pytest.raises(ContractError):
        simplify_terrain(np.zeros((3, 3)), 1, -0.1)


def test_xyz_and_obj_roundtrip(tmp_path):
    src = tmp_path / "pts.xyz"
    src.write_text("# header\n0 0 1\n1,0,1\n0 1 1  # trailing\n\n0.2 0.2 1\n")
    P = read_xyz(src)
    assert P.shape == (4, 3)
    res = simplify_terrain(P, 1, 0.01, rng_seed=0)
    res.point_errors = res.mesh.vertical_errors(P)
    side = write_mesh(res, tmp_path / "m.obj", tmp_path / "m.json", eps=0.01)
    text = (tmp_path / "m.obj").read_text().splitlines()
    vs = [ln for ln in text if ln.startswith("v ")]
    fs = [ln for ln in text if ln.startswith("f ")]
    assert len(fs) == len(res.mesh) and vs
    ids = {int(i) for ln in fs for i in ln.split()[1:]}
    assert min(ids) == 1 and max(ids) == len(vs)
    loaded = json.loads((tmp_path / "m.json").read_text())
    assert loaded == side and loaded["max_vertical_error"] <= 0.01


def test_read_xyz_errors(tmp_path):
    bad = tmp_path / "bad.xyz"
    bad.write_text("1 2\n")
    with pytest.raises(ContractError):
        read_xyz(bad)
    bad.write_text("1 2 nan\n")
    with pytest.raises(ContractError):
        read_xyz(bad)


def test_assemble_keeps_probe_sized_triangles():
    big = T3((0, 0), (1, 0), (1, 1), (0, 0, 1))
    p = np.array([1.0, 0.5])
    probe = Triangle3(Triangle2.probe(p), np.array([0, 0, 2.0]))
    mesh = assemble_terrain([big, probe])
    # the half of the probe right of x = 1 survives as its own face
    f = mesh.locate([p + [1e-8, -2e-8]])[0]
    assert f >= 0 and mesh.assignment[f] == 1
    assert mesh.assignment[mesh.locate([p])[0]] == 0
    assert mesh.projected_area() == pytest.approx(0.5 + probe.base.area / 2, rel=1e-6)


def test_assemble_keeps_thin_tip():
    # a needle whose tip pokes 1e-5 past an earlier triangle's edge; the tip is
    # narrower than the dedup tolerance and must still be meshed
    block = T3((0.1 - 1e-5, -1), (2, -1), (0.1 - 1e-5, 1))
    p = np.array([0.1 - 2e-5, 0.0])
    needle = T3(p, (1.0, -0.002), (1.0, 0.002), (0, 0, 1))
    mesh = assemble_terrain([block, needle])
    f = mesh.locate([p])[0]
    assert f >= 0 and mesh.assignment[f] == 1
