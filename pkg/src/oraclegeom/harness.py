"""Runs a learner or solver on an instance file and checks the answer against ground truth.

Runners only see the public block and the oracles.  The checks at the end of
each ``_run_*`` function are the only code here that looks at hidden data.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import config
from .balls import AssumptionViolation, learn_k_ball_cover, learn_single_ball, mono_ball_search
from .geom import triangles_contain
from .instances import InstanceFile, SchemaError, ground_truth
from .oracles import (Color, ProximityOracle, QueryLedger, RegionOracle, TerrainOracle, UlpOracle,
                      fit_plane_within, reveal)
from .terrain import simplify_terrain
from .triangles import SAMPLE_TRIPLES, CoverAssumptionViolation, learn_triangle_cover
from .ulp import (LineView, solve_ulp_1d, solve_ulp_centerpoint, solve_ulp_cutting_2d, solve_ulp_naive,
                  solve_ulp_seplab_2d)
from .ulp.result import committed_lp_feasible

COMMANDS = {
    "solve-ulp": ("ulp",),
    "learn-ball": ("kdisks", "chain"),
    "learn-kballs": ("kdisks",),
    "cover-triangles": ("ktriangles",),
    "simplify-terrain": ("terrain",),
}
SOLVERS = ("oneD", "centerpoint", "cutting", "seplab", "naive-loop")
STRATEGIES = ("sample-triples", "line-triples", "implicit-centerpoint", "counterexample-loop")

ASSUMPTION_ERRORS = (AssumptionViolation, CoverAssumptionViolation)


def jsonable(x):
    """Plain JSON types for numpy scalars/arrays nested in dicts and lists."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, Color):
        return x.name.lower()
    return x


@dataclass
class RunReport:
    command: str
    instance: dict
    flags: dict
    outcome: str
    ledger: dict
    wall_time: float = 0.0
    log: list = field(default_factory=list)
    verification: dict = field(default_factory=dict)
    envelope: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    artifact: object = field(default=None, repr=False, compare=False)

    @property
    def verified(self) -> bool:
        return all(v is True for v in self.verification.values() if isinstance(v, bool))

    @property
    def iterations(self) -> int:
        return len(self.log)

    def to_dict(self, wall_time: bool = True) -> dict:
        d = {
            "command": self.command, "instance": self.instance, "flags": self.flags,
            "outcome": self.outcome, "ledger": self.ledger, "log": self.log,
            "verification": self.verification, "envelope": self.envelope, "result": self.result,
        }
        if wall_time:
            d["wall_time"] = self.wall_time
        return jsonable(d)

    def to_json(self, wall_time: bool = True) -> str:
        return json.dumps(self.to_dict(wall_time), sort_keys=True, indent=1)

    def csv_row(self) -> dict:
        row = {"command": self.command, "n": self.instance.get("n"), "k": self.instance["params"].get("k", ""),
               "seed": self.instance.get("seed"), "outcome": self.outcome, "iterations": self.iterations}
        row.update({f"q_{k}": v for k, v in sorted(self.ledger.items())})
        row["q_total"] = sum(self.ledger.values())
        return row


def _klogn(k, n):
    return k * math.log2(max(n, 2))


# ---------------------------------------------------------------- runners


def _run_ulp(inst: InstanceFile, flags: dict, ledger: QueryLedger):
    gt = ground_truth(inst)
    oracle = UlpOracle(gt, ledger)
    planes = inst.planes
    dim = int(inst.public["dim"])
    solver = flags.get("solver") or ("oneD" if dim == 1 else "cutting" if dim == 2 else "centerpoint")
    seed = flags.get("seed", 0)
    if solver == "oneD":
        if dim != 1:
            raise SchemaError("the oneD solver needs a 1-dimensional instance")
        line = LineView(np.zeros(1), np.ones(1))
        bnd = [t for t in (line.crossing(h.normal, h.offset) for h in planes) if t is not None]
        res = solve_ulp_1d(bnd, oracle, line=line)
    elif solver == "centerpoint":
        res = solve_ulp_centerpoint(planes, oracle, dim, rng_seed=seed)
    elif solver == "cutting":
        if dim != 2:
            raise SchemaError("the cutting solver is planar")
        res = solve_ulp_cutting_2d(planes, oracle, r=flags.get("r") or 4, base_size=flags.get("base_size") or 8,
                                   rng_seed=seed)
    elif solver == "seplab":
        if dim != 2:
            raise SchemaError("the seplab solver is planar")
        res = solve_ulp_seplab_2d(planes, oracle, rng_seed=seed)
    elif solver == "naive-loop":
        res = solve_ulp_naive(planes, oracle, dim)
    else:
        raise SchemaError(f"unknown solver {solver!r}")
    flags["solver"] = solver

    tol = config.TOL.side
    with reveal():
        sides = gt.sides
        expected = bool(inst.params.get("feasible", True))
        ver = {"outcome matches planted": res.feasible == expected}
        if res.feasible:
            N, o = gt.normals, gt.offsets
            slack = sides * (N @ res.witness - o)
            ver["witness satisfies all hidden constraints"] = bool(np.all(slack >= -tol))
        else:
            ver["committed core is LP-infeasible"] = not committed_lp_feasible(res.core or res.committed, dim)
    n = len(planes)
    env = {"queries": res.queries, "log2_n": math.log2(max(n, 2)),
           "queries_over_log2sq": res.queries / math.log2(max(n, 2)) ** 2}
    out = {"witness": None if res.witness is None else res.witness, "stats": res.stats,
           "committed": len(res.committed)}
    return res.outcome, [], ver, env, out, res


def _run_ball(inst: InstanceFile, flags: dict, ledger: QueryLedger):
    gt = ground_truth(inst)
    prox = ProximityOracle(gt, ledger)
    P = inst.points
    seed = flags.get("seed", 0)
    if inst.kind == "chain":
        strategy = flags.get("strategy") or "implicit-centerpoint"
        required = inst.public["required"]
        res = mono_ball_search(required, P, prox, Color.RED, strategy, rng_seed=seed)
        flags["strategy"] = strategy
        with reveal():
            ver = {"ball found": res.found}
            if res.found:
                inside = res.ball.contains(P)
                ver["ball is monochromatic"] = bool(np.all(gt.colors[inside] == Color.RED))
                ver["ball holds the required points"] = bool(np.all(inside[required]))
        env = {"iterations": res.iterations, "queries": res.queries, "n": len(P)}
        out = {"ball": None if not res.found else {"center": res.ball.center, "radius": res.ball.radius}}
        return ("found" if res.found else "none"), [], ver, env, out, res
    ball, labels = learn_single_ball(P, prox, rng_seed=seed)
    with reveal():
        ver = {"labels exact": bool(np.array_equal(np.asarray(labels, dtype=np.int64),
                                                   gt.colors.astype(np.int64)))}
    q = ledger.total("NN", "FN")
    env = {"nn_fn_queries": q, "n": len(P)}
    out = {"ball": {"center": ball.center, "radius": ball.radius}}
    return "learned", [], ver, env, out, (ball, labels)


def _run_kballs(inst: InstanceFile, flags: dict, ledger: QueryLedger):
    gt = ground_truth(inst)
    prox = ProximityOracle(gt, ledger)
    k = flags.get("k") or int(inst.params["k"])
    kw = {}
    if flags.get("sample_const"):
        kw["c_ra"] = flags["sample_const"]
    strategy = flags.get("strategy") or "implicit-centerpoint"
    flags["strategy"] = strategy
    cov = learn_k_ball_cover(inst.points, k, prox, rng_seed=flags.get("seed", 0), strategy=strategy, **kw)
    with reveal():
        ver = {"labels exact": bool(np.array_equal(np.asarray(cov.labels, dtype=np.int64),
                                                   gt.colors.astype(np.int64)))}
    n = len(inst.points)
    acc = [e for e in cov.log if e.get("accepted")]
    env = {"accepted_iterations": len(acc), "iterations_over_klogn": len(acc) / _klogn(k, n),
           "progress_fractions": [e.get("fraction") for e in acc]}
    out = {"balls": [{"center": b.center, "radius": b.radius, "color": c} for b, c in cov.balls]}
    return "learned", cov.log, ver, env, out, cov


def _check_triangles(inst, gt, tris):
    P = inst.points
    if not tris:
        return {"every triangle monochromatic": True, "all points covered by their color": len(P) == 0}
    T = np.array([t.vertices for t, _ in tris])
    inside = triangles_contain(T, P)
    with reveal():
        col = gt.colors
    mono = all(bool(np.all(col[inside[j]] == int(c))) for j, (_, c) in enumerate(tris))
    tc = np.array([int(c) for _, c in tris])
    good = inside & (tc[:, None] == col[None, :])
    return {"every triangle monochromatic": mono, "all points covered by their color": bool(good.any(axis=0).all())}


def _run_triangles(inst: InstanceFile, flags: dict, ledger: QueryLedger):
    gt = ground_truth(inst)
    k = flags.get("k") or int(inst.params["k"])
    strategy = flags.get("strategy") or SAMPLE_TRIPLES
    flags["strategy"] = strategy
    kw = {"c_sample": flags["sample_const"]} if flags.get("sample_const") else {}
    cov = learn_triangle_cover(k, RegionOracle(gt, ledger), flags.get("seed", 0), strategy, **kw)
    ver = _check_triangles(inst, gt, cov.triangles)
    n = len(inst.points)
    env = {"cover_size": cov.size, "size_over_klogn": cov.size / _klogn(k, n)}
    out = {"triangles": [{"vertices": t.vertices, "color": c} for t, c in cov.triangles]}
    return "covered", cov.log, ver, env, out, cov


def _run_terrain(inst: InstanceFile, flags: dict, ledger: QueryLedger):
    gt = ground_truth(inst)
    k = flags.get("k") or int(inst.params["k"])
    eps = flags.get("eps") if flags.get("eps") is not None else float(inst.params["eps"])
    strategy = flags.get("strategy") or SAMPLE_TRIPLES
    flags.update(strategy=strategy, eps=eps)
    kw = {"c_sample": flags["sample_const"]} if flags.get("sample_const") else {}
    res = simplify_terrain(TerrainOracle(gt, ledger), k, eps, flags.get("seed", 0), strategy, **kw)
    P = inst.points
    tol = config.TOL.side
    with reveal():
        xyz = np.c_[P, gt.heights]
    err = res.mesh.vertical_errors(xyz)
    res.point_errors = err
    valid = True
    for t in res.cover:
        inside = t.base.contains(P)
        if np.abs(t.height(P[inside]) - xyz[inside, 2]).max(initial=0.0) > eps + tol:
            # the stored plane is off; the oracle's LP must still find one
            valid = valid and fit_plane_within(P[inside], xyz[inside, 2], eps)[2] < 0
    ver = {"max vertical error within eps": bool(err.max(initial=0.0) <= eps + tol),
           "every cover triangle valid": valid,
           "mesh covers every point": bool(np.all(np.isfinite(err)))}
    n = len(P)
    env = {"cover_size": len(res.cover), "size_over_klogn": len(res.cover) / _klogn(k, n),
           "max_vertical_error": float(err.max(initial=0.0)), "faces": len(res.mesh)}
    out = {"cover": [{"triangle": t.base.vertices, "plane": t.plane} for t in res.cover]}
    return "simplified", res.log, ver, env, out, res


_RUNNERS = {"solve-ulp": _run_ulp, "learn-ball": _run_ball, "learn-kballs": _run_kballs,
            "cover-triangles": _run_triangles, "simplify-terrain": _run_terrain}


def run(command: str, inst: InstanceFile, **flags) -> RunReport:
    """Execute ``command`` on ``inst`` against the reference oracles and verify the answer.

    Assumption violations propagate as exceptions.
    """
    if command not in COMMANDS:
        raise SchemaError(f"unknown command {command!r}")
    if inst.kind not in COMMANDS[command]:
        raise SchemaError(f"{command} needs a {' or '.join(COMMANDS[command])} instance, got {inst.kind}")
    flags = {k: v for k, v in flags.items() if v is not None}
    flags.setdefault("seed", 0)
    ledger = QueryLedger()
    t0 = time.perf_counter()
    outcome, log, ver, env, out, artifact = _RUNNERS[command](inst, flags, ledger)
    wall = time.perf_counter() - t0
    info = {"kind": inst.kind, "params": inst.params, "seed": inst.seed, "n": inst.n}
    return RunReport(command, info, dict(sorted(flags.items())), outcome, ledger.snapshot(), wall, list(log),
                     ver, env, out, artifact)
