"""Planted-instance generators and the JSON instance file format.

An instance file carries public data (constraint planes or point
coordinates) next to a ``hidden`` block (sides, colors, heights and the
planted structure).  Only :func:`ground_truth` reads the hidden block.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config
from .geom import ConvexPolygon, Hyperplane, Triangle2, clip_polygon_rows, triangles_contain
from .oracles import ColoredGroundTruth, UlpGroundTruth

KINDS = ("ulp", "kdisks", "ktriangles", "terrain", "chain")
SCHEMA_VERSION = 1


class GenerationError(RuntimeError):
    pass


class SchemaError(ValueError):
    pass


@dataclass
class InstanceFile:
    kind: str
    params: dict
    seed: int
    public: dict
    hidden: dict = field(repr=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "version": SCHEMA_VERSION, "seed": self.seed, "params": self.params,
                "public": self.public, "hidden": self.hidden}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def save(self, path):
        Path(path).write_text(self.dumps() + "\n")

    # public accessors

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.public["points"], dtype=np.float64)

    @property
    def planes(self) -> list[Hyperplane]:
        N = np.asarray(self.public["normals"], dtype=np.float64)
        o = np.asarray(self.public["offsets"], dtype=np.float64)
        return [Hyperplane(a, b) for a, b in zip(N, o)]

    @property
    def n(self) -> int:
        key = "offsets" if self.kind == "ulp" else "points"
        return len(self.public[key])


_REQUIRED_PUBLIC = {"ulp": ("dim", "normals", "offsets"), "kdisks": ("points",), "ktriangles": ("points",),
                    "terrain": ("points",), "chain": ("points", "required")}
_REQUIRED_HIDDEN = {"ulp": ("sides",), "kdisks": ("colors",), "ktriangles": ("colors",),
                    "terrain": ("heights",), "chain": ("colors",)}


def loads(text: str) -> InstanceFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"instance is not valid JSON: {e}") from None
    return from_dict(doc)


def load(path) -> InstanceFile:
    return loads(Path(path).read_text())


def from_dict(doc) -> InstanceFile:
    if not isinstance(doc, dict):
        raise SchemaError("instance must be a JSON object")
    for key in ("kind", "seed", "params", "public", "hidden"):
        if key not in doc:
            raise SchemaError(f"instance lacks '{key}'")
    kind = doc["kind"]
    if kind not in KINDS:
        raise SchemaError(f"unknown instance kind {kind!r}")
    if doc.get("version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc.get('version')}")
    for key in _REQUIRED_PUBLIC[kind]:
        if key not in doc["public"]:
            raise SchemaError(f"{kind} instance lacks public '{key}'")
    for key in _REQUIRED_HIDDEN[kind]:
        if key not in doc["hidden"]:
            raise SchemaError(f"{kind} instance lacks hidden '{key}'")
    inst = InstanceFile(kind, dict(doc["params"]), doc["seed"], dict(doc["public"]), dict(doc["hidden"]))
    _check_shapes(inst)
    return inst


def _check_shapes(inst: InstanceFile):
    try:
        if inst.kind == "ulp":
            N = np.asarray(inst.public["normals"], dtype=np.float64)
            o = np.asarray(inst.public["offsets"], dtype=np.float64)
            s = np.asarray(inst.hidden["sides"])
            d = int(inst.public["dim"])
            if len(N) and (N.ndim != 2 or N.shape[1] != d) or len(o) != len(N) or len(s) != len(N):
                raise SchemaError("ulp arrays have inconsistent shapes")
        else:
            P = np.asarray(inst.public["points"], dtype=np.float64)
            if P.ndim != 2 or P.shape[1] != 2:
                raise SchemaError("points must be an (n, 2) array")
            key = "heights" if inst.kind == "terrain" else "colors"
            if len(inst.hidden[key]) != len(P):
                raise SchemaError(f"hidden {key} must have one entry per point")
            if not np.all(np.isfinite(P)):
                raise SchemaError("points must be finite")
    except (TypeError, ValueError) as e:
        if isinstance(e, SchemaError):
            raise
        raise SchemaError(f"malformed arrays: {e}") from None


def ground_truth(inst: InstanceFile):
    """Oracle-layer view of the instance; the only reader of the hidden block."""
    if inst.kind == "ulp":
        mask = inst.hidden.get("implicit_mask")
        return UlpGroundTruth(inst.planes, inst.hidden["sides"], mask, dim=int(inst.public["dim"]))
    if inst.kind == "terrain":
        return ColoredGroundTruth(inst.points, heights=inst.hidden["heights"])
    return ColoredGroundTruth(inst.points, colors=inst.hidden["colors"])


def _f(a) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


# ---------------------------------------------------------------- ULP


def gen_ulp(n: int, dim: int = 2, feasible: bool = True, seed: int = 0, *, spread: float = 1.0) -> InstanceFile:
    """Random unit-normal hyperplanes crossing ``[-spread, spread]^d`` with hidden sides.

    Feasible instances orient every plane toward a planted point; infeasible
    ones plant a minimal infeasible core of ``d + 1`` planes (outward facets
    of a simplex) at random positions and orient the rest toward a point.
    """
    if dim not in (1, 2, 3):
        raise GenerationError("ulp instances support dimension 1, 2 or 3")
    if n < (1 if feasible else dim + 1):
        raise GenerationError(f"n={n} too small for a {'feasible' if feasible else 'infeasible'} instance")
    rng = np.random.default_rng(seed)
    N = rng.normal(size=(n, dim))
    N /= np.linalg.norm(N, axis=1, keepdims=True)
    anchor = rng.uniform(-spread, spread, size=(n, dim))
    o = (N * anchor).sum(axis=1)
    p = rng.uniform(-0.5 * spread, 0.5 * spread, size=dim)
    # keep the planted point clear of every plane
    val = N @ p - o
    close = np.abs(val) < 1e-6
    o[close] -= np.sign(val[close] + 0.5) * 1e-5
    sides = np.where(N @ p - o >= 0, 1, -1)
    core: list[int] = []
    if not feasible:
        core = sorted(rng.choice(n, size=dim + 1, replace=False).tolist())
        q = rng.uniform(-0.5 * spread, 0.5 * spread, size=dim)
        dirs = _simplex_directions(dim, rng)
        for j, u in zip(core, dirs):
            N[j] = u
            o[j] = u @ q + rng.uniform(0.05, 0.3) * spread
            sides[j] = 1
    params = {"n": n, "dim": dim, "feasible": bool(feasible), "spread": spread}
    hidden = {"sides": sides.astype(int).tolist(), "planted_point": _f(p), "core": core}
    return InstanceFile("ulp", params, seed, {"dim": dim, "normals": _f(N), "offsets": _f(o)}, hidden)


def _simplex_directions(dim, rng):
    """``dim + 1`` unit vectors with a positive combination summing to zero."""
    while True:
        U = rng.normal(size=(dim + 1, dim))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        # positively spanning iff the origin is strictly inside their hull
        A = np.vstack([U.T, np.ones(dim + 1)])
        rhs = np.zeros(dim + 1)
        rhs[-1] = 1.0
        try:
            lam = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            continue
        if lam.min() > 0.05:
            return U


# ---------------------------------------------------------------- colored regions


def _disjoint_disks(k, margin, rng, attempts=2000):
    rmax = min(0.3, 0.55 / math.sqrt(k))
    for _ in range(50):
        disks = []
        tries = 0
        while len(disks) < k and tries < attempts:
            tries += 1
            r = rng.uniform(0.5, 1.0) * rmax
            c = rng.uniform(r, 1.0 - r, size=2)
            if all(np.linalg.norm(c - c2) >= r + r2 + margin for c2, r2 in disks):
                disks.append((c, r))
        if len(disks) == k:
            return disks
    raise GenerationError(f"could not place {k} disjoint regions with margin {margin}")


def _region_colors(k, rng):
    colors = rng.integers(0, 2, size=k)
    if k >= 2 and len(set(colors.tolist())) == 1:
        colors[rng.integers(k)] ^= 1
    return colors


def _split_counts(n, weights, rng):
    w = np.asarray(weights, dtype=np.float64)
    counts = rng.multinomial(n - len(w), w / w.sum()) + 1 if n >= len(w) else np.ones(len(w), dtype=int)
    return counts


def gen_kdisks(n: int, k: int, margin: float = 0.05, seed: int = 0) -> InstanceFile:
    """Points uniform inside ``k`` disjoint disks (pairwise gap >= margin), one color per disk."""
    if k < 1 or n < k:
        raise GenerationError("need k >= 1 and n >= k")
    rng = np.random.default_rng(seed)
    disks = _disjoint_disks(k, margin, rng)
    colors = _region_colors(k, rng)
    counts = _split_counts(n, [r * r for _, r in disks], rng)
    P, C, R = [], [], []
    for j, ((c, r), cnt) in enumerate(zip(disks, counts)):
        rad = r * np.sqrt(rng.random(cnt))
        ang = rng.random(cnt) * 2 * math.pi
        P.append(c + np.c_[rad * np.cos(ang), rad * np.sin(ang)])
        C.extend([int(colors[j])] * cnt)
        R.extend([j] * cnt)
    perm = rng.permutation(n)
    P = np.vstack(P)[perm]
    hidden = {"colors": np.asarray(C)[perm].tolist(), "region": np.asarray(R)[perm].tolist(),
              "disks": [{"center": _f(c), "radius": float(r), "color": int(col)}
                        for (c, r), col in zip(disks, colors)]}
    return InstanceFile("kdisks", {"n": n, "k": k, "margin": margin}, seed, {"points": _f(P)}, hidden)


def _sample_in_triangle(T, cnt, rng):
    u = rng.random((cnt, 2))
    flip = u.sum(axis=1) > 1
    u[flip] = 1 - u[flip]
    return T[0] + u[:, :1] * (T[1] - T[0]) + u[:, 1:] * (T[2] - T[0])


def gen_ktriangles(n: int, k: int, margin: float = 0.02, seed: int = 0) -> InstanceFile:
    """Points uniform inside ``k`` disjoint triangles, one color per triangle.

    Each triangle is inscribed in its own disk of a disjoint-disk packing, so
    gaps between triangles are at least ``margin``.
    """
    if k < 1 or n < k:
        raise GenerationError("need k >= 1 and n >= k")
    rng = np.random.default_rng(seed)
    disks = _disjoint_disks(k, margin, rng)
    colors = _region_colors(k, rng)
    tris = []
    for c, r in disks:
        base = rng.random() * 2 * math.pi
        ang = base + np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3]) + rng.uniform(-0.5, 0.5, 3)
        tris.append(c + r * np.c_[np.cos(ang), np.sin(ang)])
    areas = [abs(Triangle2.from_array(T).signed_area) for T in tris]
    counts = _split_counts(n, areas, rng)
    P, C = [], []
    for j, (T, cnt) in enumerate(zip(tris, counts)):
        P.append(_sample_in_triangle(T, cnt, rng))
        C.extend([int(colors[j])] * cnt)
    perm = rng.permutation(n)
    P = np.vstack(P)[perm]
    hidden = {"colors": np.asarray(C)[perm].tolist(),
              "triangles": [{"vertices": _f(T), "color": int(col)} for T, col in zip(tris, colors)]}
    return InstanceFile("ktriangles", {"n": n, "k": k, "margin": margin}, seed, {"points": _f(P)}, hidden)


# ---------------------------------------------------------------- terrain


def convex_partition(k: int, rng) -> list[ConvexPolygon]:
    """Split the unit square into ``k`` convex cells by repeatedly cutting the largest cell."""
    cells = [ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))]
    while len(cells) < k:
        j = int(np.argmax([c.area for c in cells]))
        cell = cells.pop(j)
        for _ in range(100):
            p = cell.centroid() + rng.normal(scale=0.1, size=2) * math.sqrt(cell.area)
            th = rng.random() * math.pi
            a = np.array([math.cos(th), math.sin(th)])
            b = float(a @ p)
            lo, hi = clip_polygon_rows(cell, a, b), clip_polygon_rows(cell, -a, -b)
            if min(lo.area, hi.area) > 0.25 * cell.area:
                cells.extend([lo, hi])
                break
        else:
            raise GenerationError("could not split the partition evenly")
    return cells


def gen_terrain(n: int, k: int, eps: float = 0.1, seed: int = 0, *, slope: float = 1.0) -> InstanceFile:
    """Heights from ``k`` planes over a convex partition of the unit square, plus noise in ``[-eps/2, eps/2]``."""
    if k < 1 or n < 1 or eps < 0:
        raise GenerationError("need k >= 1, n >= 1 and eps >= 0")
    rng = np.random.default_rng(seed)
    cells = convex_partition(k, rng)
    planes = np.c_[rng.uniform(-slope, slope, size=(k, 2)), rng.uniform(0.0, 1.0, size=k)]
    P = rng.random((n, 2))
    cell_of = np.full(n, -1)
    for j, cell in enumerate(cells):
        inside = cell.contains(P) & (cell_of < 0)
        cell_of[inside] = j
    if np.any(cell_of < 0):
        raise GenerationError("partition does not cover every point")
    base = (P * planes[cell_of, :2]).sum(axis=1) + planes[cell_of, 2]
    z = base + rng.uniform(-eps / 2, eps / 2, size=n)
    hidden = {"heights": _f(z), "cell": cell_of.tolist(), "planes": _f(planes),
              "cells": [_f(c.vertices) for c in cells]}
    return InstanceFile("terrain", {"n": n, "k": k, "eps": eps, "slope": slope}, seed, {"points": _f(P)}, hidden)


# ---------------------------------------------------------------- adversarial chain


CHAIN_GROWTH = 1.75
CHAIN_NEAR = 1e-2


def chain_capacity(growth: float = CHAIN_GROWTH) -> int:
    """Longest chain whose spacing fits between the tolerance floor and the lifted box."""
    far = 0.45 * config.TOL.box
    return int(math.floor(math.log(far / CHAIN_NEAR) / math.log(growth))) + 2


def gen_chain(n: int, seed: int = 0, *, growth: float = CHAIN_GROWTH) -> InstanceFile:
    """One red point and ``n - 1`` blue points that the counterexample loop removes one per iteration.

    Blue points sit on a ray from the red point at geometrically growing
    distances.  With ``phi < growth < 2`` the nearest blue point to the
    center of each loop disk is the next one inward, so every blue point
    becomes a counterexample in turn.  The geometric spacing is forced
    (a nearest-point counterexample halves the gap otherwise), which caps
    the chain length at :func:`chain_capacity`.  The layout is fully
    determined by ``n`` and ``growth``; ``seed`` is only recorded.
    """
    if n < 2:
        raise GenerationError("a chain needs at least two points")
    if not (1.0 + math.sqrt(5.0)) / 2.0 < growth < 2.0:
        raise GenerationError("chain growth must lie strictly between the golden ratio and 2")
    cap = chain_capacity(growth)
    if n > cap:
        raise GenerationError(f"chains longer than {cap} points do not fit the tolerance and box settings")
    far = 0.45 * config.TOL.box
    # along -x the blue constraints leave w_y free, so the loop's first disk holds the whole ray
    d = np.array([-1.0, 0.0])
    dist = far * growth ** -np.arange(n - 1, dtype=np.float64)
    P = np.vstack([np.zeros((1, 2)), dist[::-1, None] * d])
    colors = [0] + [1] * (n - 1)
    return InstanceFile("chain", {"n": n, "growth": growth}, seed, {"points": _f(P), "required": [0]},
                        {"colors": colors})


GENERATORS = {"ulp": gen_ulp, "kdisks": gen_kdisks, "ktriangles": gen_ktriangles, "terrain": gen_terrain,
              "chain": gen_chain}


def generate(kind: str, seed: int = 0, **params) -> InstanceFile:
    if kind not in GENERATORS:
        raise GenerationError(f"unknown instance kind {kind!r}")
    return GENERATORS[kind](seed=seed, **params)


def planted_membership(inst: InstanceFile) -> np.ndarray:
    """Index of the planted region holding each point (white-box checks)."""
    if inst.kind == "kdisks":
        return np.asarray(inst.hidden["region"])
    if inst.kind == "ktriangles":
        P = inst.points
        out = np.full(len(P), -1)
        for j, t in enumerate(inst.hidden["triangles"]):
            m = triangles_contain(np.asarray(t["vertices"])[None], P, 1e-9)[0] & (out < 0)
            out[m] = j
        return out
    if inst.kind == "terrain":
        return np.asarray(inst.hidden["cell"])
    raise ValueError(f"{inst.kind} instances have no planted regions")
