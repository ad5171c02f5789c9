"""Terrain simplification: cover sampled heights by few validated planar triangles.

The learner reuses the triangle-cover loop; instead of a color verdict it asks
the validation oracle whether one plane fits every point over a candidate
triangle within ``eps``.  The accepted triangles are then overlaid into a
height field whose faces are interior-disjoint.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import config
from .geom import ContractError, ConvexPolygon, Triangle2, clip_polygon_rows, triangles_contain
from .oracles import ColoredGroundTruth, QueryLedger, TerrainOracle, Valid, fit_plane_within
from .triangles import SAMPLE_TRIPLES, CoverAssumptionViolation, cover_loop


class TerrainPoint(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True, eq=False)
class Triangle3:
    base: Triangle2
    plane: np.ndarray  # (a, b, c) of z = a x + b y + c

    def __post_init__(self):
        p = np.asarray(self.plane, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(p)):
            raise ContractError("plane coefficients must be finite")
        object.__setattr__(self, "plane", p)

    def height(self, xy) -> np.ndarray:
        xy = np.atleast_2d(np.asarray(xy, dtype=np.float64))
        return xy @ self.plane[:2] + self.plane[2]

    @property
    def vertices3(self) -> np.ndarray:
        v = self.base.vertices
        return np.hstack([v, self.height(v)[:, None]])


@dataclass
class TerrainMesh:
    faces: list[Triangle3] = field(default_factory=list)
    assignment: list[int] = field(default_factory=list)  # face -> cover triangle index

    def __len__(self):
        return len(self.faces)

    def locate(self, xy) -> np.ndarray:
        """Lowest index of a face containing each projected point, -1 when none does."""
        xy = np.atleast_2d(np.asarray(xy, dtype=np.float64))
        if not self.faces:
            return np.full(len(xy), -1)
        inside = triangles_contain(np.array([f.base.vertices for f in self.faces]), xy)
        hit = inside.any(axis=0)
        return np.where(hit, inside.argmax(axis=0), -1)

    def vertical_errors(self, xyz) -> np.ndarray:
        """|z - face height| per point; ``inf`` for points outside the mesh."""
        xyz = np.atleast_2d(np.asarray(xyz, dtype=np.float64))
        face = self.locate(xyz[:, :2])
        err = np.full(len(xyz), np.inf)
        for f in np.unique(face[face >= 0]):
            sel = face == f
            err[sel] = np.abs(xyz[sel, 2] - self.faces[f].height(xyz[sel, :2]))
        return err

    def projected_area(self) -> float:
        return float(sum(f.base.area for f in self.faces))

    def to_obj(self) -> str:
        index: dict[tuple, int] = {}
        vlines, flines = [], []
        for f in self.faces:
            ids = []
            for v in f.vertices3:
                key = tuple(float(c) for c in v)
                if key not in index:
                    index[key] = len(index) + 1
                    vlines.append("v %.17g %.17g %.17g" % key)
                ids.append(index[key])
            flines.append("f %d %d %d" % tuple(ids))
        return "\n".join(vlines + flines) + "\n"


@dataclass
class TerrainResult:
    cover: list[Triangle3]
    mesh: TerrainMesh
    ledger: dict
    log: list
    point_errors: np.ndarray | None = None  # filled in by white-box checks


# ---------------------------------------------------------------- assembly


def _subtract(piece: ConvexPolygon, A: np.ndarray, b: np.ndarray) -> list[ConvexPolygon]:
    """Convex pieces of ``piece`` minus the convex region ``A x >= b``."""
    out = []
    rest = piece
    for a, c in zip(A, b):
        outside = clip_polygon_rows(rest, -a, -c)
        if outside.has_interior(config.TOL.dedup ** 2):
            out.append(outside)
        rest = clip_polygon_rows(rest, a, c)
        if not rest.has_interior(config.TOL.dedup ** 2):
            break
    return out


def _ccw(t: Triangle2) -> np.ndarray:
    v = t.vertices
    return v if t.signed_area >= 0 else v[::-1].copy()


def assemble_terrain(cover: list[Triangle3]) -> TerrainMesh:
    """Overlay the projected cover and lift each face by its lowest-index source plane.

    Every cover triangle keeps only the part not already claimed by an
    earlier one; those parts are convex pieces, fan-triangulated.  Clipping
    runs in the triangle's own affine frame (it becomes the unit reference
    triangle), so thin or tiny triangles survive the absolute tolerances.
    """
    mesh = TerrainMesh()
    claimed: list[tuple[np.ndarray, np.ndarray]] = []
    ref = ConvexPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    for i, tri in enumerate(cover):
        V = _ccw(tri.base)
        p0 = V[0]
        E = np.column_stack([V[1] - p0, V[2] - p0])
        if abs(np.linalg.det(E)) <= 0:
            continue
        pieces = [ref]
        for A, b in claimed:
            Au = A @ E
            norm = np.linalg.norm(Au, axis=1)
            norm[norm == 0] = 1.0
            pieces = [q for p in pieces for q in _subtract(p, Au / norm[:, None], (b - A @ p0) / norm)]
            if not pieces:
                break
        for p in pieces:
            v = p.vertices @ E.T + p0
            for j in range(1, len(v) - 1):
                mesh.faces.append(Triangle3(Triangle2(v[0], v[j], v[j + 1]), tri.plane))
                mesh.assignment.append(i)
        claimed.append(ConvexPolygon(V).halfspace_rows())
    return mesh


# ---------------------------------------------------------------- learner


def _interpolate(T: np.ndarray, Zv: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Heights at ``X`` of the planes through each triangle's lifted vertices, shape (len(T), len(X))."""
    a, b, c = T[:, 0], T[:, 1], T[:, 2]
    e1, e2 = b - a, c - a
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    det = np.where(np.abs(det) > 1e-300, det, 1e-300)
    dx = X[None, :, 0] - a[:, 0, None]
    dy = X[None, :, 1] - a[:, 1, None]
    l1 = (dx * e2[:, 1, None] - dy * e2[:, 0, None]) / det[:, None]
    l2 = (e1[:, 0, None] * dy - e1[:, 1, None] * dx) / det[:, None]
    return Zv[:, 0, None] + l1 * (Zv[:, 1] - Zv[:, 0])[:, None] + l2 * (Zv[:, 2] - Zv[:, 0])[:, None]


def _as_oracle(points) -> TerrainOracle:
    if isinstance(points, TerrainOracle):
        return points
    P = np.asarray(points, dtype=np.float64)
    if P.ndim != 2 or P.shape[1] != 3:
        raise ContractError("terrain points must be an (n, 3) array")
    return TerrainOracle(ColoredGroundTruth(P[:, :2], heights=P[:, 2]), QueryLedger())


def simplify_terrain(points, k: int, eps: float, rng_seed=None, strategy: str = SAMPLE_TRIPLES, *,
                     c_sample: float = 0.002, max_failures: int = 50, budget: int = 20000) -> TerrainResult:
    """eps-cover a sampled terrain by validated triangles and assemble the mesh.

    ``points`` is either an ``(n, 3)`` array or a :class:`TerrainOracle`.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if eps < 0:
        raise ContractError("eps must be non-negative")
    oracle = _as_oracle(points)
    rng = np.random.default_rng(rng_seed)
    seed_of_query = iter(range(1 << 62))

    def draw(cover, rng_):
        return oracle.sample_uncovered(cover, rng=rng_)

    heights: dict[int, float] = {}
    sample = {}

    def probe_heights(idx, S):
        # a validated plane over a one-point probe passes through that point
        for i, p in zip(idx, S):
            i = int(i)
            if i not in heights:
                v = oracle.validate_triangle(Triangle2.probe(p), eps, rng_seed=next(seed_of_query))
                if not isinstance(v, Valid):
                    raise CoverAssumptionViolation(f"no plane fits the points under the probe at {int(i)}")
                heights[i] = float(v.plane[:2] @ p + v.plane[2])
        sample["xy"] = S
        sample["z"] = np.array([heights[int(i)] for i in idx])
        return None

    # witnesses returned by rejected validations, kept to veto look-alike candidates
    wit_xy: list = []
    wit_z: list = []

    def local_ok(t, rows):
        xy, z = sample["xy"][rows], sample["z"][rows]
        if wit_xy:
            W = np.array(wit_xy)
            hit = triangles_contain(t[None], W)[0]
            if hit.any():
                xy = np.vstack([xy, W[hit]])
                z = np.concatenate([z, np.array(wit_z)[hit]])
        return fit_plane_within(xy, z, eps)[2] < 0

    def batch_ok(T, S, inside):
        # any plane within eps of the data is within eps of the vertex heights, so
        # every point under a candidate lies within 2 eps of the vertex interpolant
        if strategy != SAMPLE_TRIPLES:
            return np.ones(len(T), dtype=bool)
        key = S[:, 0] + 1j * S[:, 1]
        order = np.argsort(key)
        pos = np.searchsorted(key[order], T[..., 0] + 1j * T[..., 1])
        Zv = sample["z"][order[np.minimum(pos, len(S) - 1)]]
        X, Z = S, sample["z"]
        if wit_xy:
            X = np.vstack([S, np.array(wit_xy)])
            Z = np.concatenate([Z, wit_z])
            inside = np.hstack([inside, triangles_contain(T, X[len(S):])])
        dev = np.abs(_interpolate(T, Zv, X) - Z[None, :])
        return ~np.any(inside & (dev > 2 * eps + config.TOL.side), axis=1)

    def verify(tri, _color):
        v = oracle.validate_triangle(tri, eps, rng_seed=next(seed_of_query))
        if isinstance(v, Valid):
            return v.plane
        if v.witness_index not in heights:
            heights[v.witness_index] = float(v.witness[2])
            wit_xy.append(v.witness[:2])
            wit_z.append(float(v.witness[2]))
        return None

    try:
        accepted, log = cover_loop(k, draw, probe_heights, verify, rng=rng, strategy=strategy,
                                   c_sample=c_sample, max_failures=max_failures, budget=budget,
                                   local_ok=local_ok, batch_ok=batch_ok)
    except CoverAssumptionViolation as e:
        raise CoverAssumptionViolation(f"no plane within eps={eps} validated: {e}") from None
    cover = [Triangle3(t, p) for t, p in accepted]
    return TerrainResult(cover, assemble_terrain(cover), oracle.ledger.snapshot(), log)


# ---------------------------------------------------------------- I/O


def read_xyz(path) -> np.ndarray:
    """Whitespace or comma separated ``x y z`` rows; ``#`` starts a comment."""
    rows = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].replace(",", " ").split()
            if not line:
                continue
            if len(line) != 3:
                raise ContractError(f"{path}:{ln}: expected 3 coordinates, got {len(line)}")
            rows.append([float(v) for v in line])
    P = np.array(rows, dtype=np.float64).reshape(-1, 3)
    if not np.all(np.isfinite(P)):
        raise ContractError(f"{path}: non-finite coordinate")
    return P


def write_mesh(result: TerrainResult, obj_path, sidecar_path=None, eps=None) -> dict:
    """Write the mesh as OBJ text plus a JSON sidecar; returns the sidecar dict."""
    with open(obj_path, "w") as fh:
        fh.write(result.mesh.to_obj())
    side = {
        "cover": [{"triangle": t.base.vertices.tolist(), "plane": t.plane.tolist()} for t in result.cover],
        "assignment": list(result.mesh.assignment),
        "ledger": result.ledger,
    }
    if result.point_errors is not None:
        err = np.asarray(result.point_errors)
        side["max_vertical_error"] = float(err.max(initial=0.0))
        side["point_errors"] = err.tolist()
    if eps is not None:
        side["eps"] = eps
    if sidecar_path is not None:
        with open(sidecar_path, "w") as fh:
            json.dump(side, fh, indent=1)
    return side
