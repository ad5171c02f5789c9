"""Oracle-driven reductions: shrink a point set or a polygon around the hidden feasible region."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import config
from ..geom import CommittedHalfspace, ConvexPolygon, approx_centerpoint, clip_polygon_rows, tukey_depth
from .result import QuerySession


@dataclass(frozen=True, eq=False)
class Feasible:
    point: np.ndarray


@dataclass(frozen=True, eq=False)
class AvoidingPolytope:
    """Committed halfspaces whose intersection contains no input point."""

    halfspaces: list[CommittedHalfspace]


def reduce_point_set(points, oracle, dim: int, rng_seed=None, *, c_small: float = 0.1,
                     session: QuerySession | None = None):
    """Query centerpoints of the surviving points until one is feasible or none survive."""
    if dim not in (2, 3):
        raise ValueError("reduce_point_set handles dimension 2 or 3")
    P = np.asarray(points, dtype=np.float64).reshape(-1, dim)
    rng = np.random.default_rng(rng_seed)
    session = session or QuerySession(oracle, dim)
    tol = config.TOL.side
    threshold = max(dim + 2, int(c_small * dim * dim * math.log(max(len(P), 2))))
    faces: list[CommittedHalfspace] = []
    stalled = False
    while len(P):
        member = len(P) <= threshold or stalled
        c = P[0] if member else approx_centerpoint(P, dim, rng=rng, verify_limit=500 if dim == 2 else 100)
        h = session.query(c)
        if h is None:
            return Feasible(np.asarray(c))
        faces.append(h)
        a, b = h.row
        keep = P @ a - b >= -tol
        if member:
            keep[0] = False
        stalled = bool(keep.all())
        P = P[keep]
    return AvoidingPolytope(faces)


def _deep_point(V: np.ndarray, rng) -> np.ndarray:
    cands = [V.mean(axis=0)]
    if len(V) >= 4:
        cands.append(approx_centerpoint(V, 2, rng=rng))
    depths = [tukey_depth(V, c) for c in cands]
    return cands[int(np.argmax(depths))]


def reduce_polygon(poly: ConvexPolygon, oracle, rng_seed=None, *, max_edges: int = 10,
                   session: QuerySession | None = None, rng=None):
    """Cut ``poly`` by oracle answers at deep points of its vertex set until
    it has at most ``max_edges`` edges.  Returns :class:`Feasible` if a query
    point turns out feasible, else the reduced polygon (possibly empty)."""
    if rng is None:
        rng = np.random.default_rng(rng_seed)
    session = session or QuerySession(oracle, 2)
    while len(poly.vertices) > max_edges:
        c = _deep_point(poly.vertices, rng)
        h = session.query(c)
        if h is None:
            return Feasible(c)
        a, b = h.row
        poly = clip_polygon_rows(poly, a, b)
    return poly
