"""Centerpoint-filter solver for undecided LPs in two and three dimensions.

Candidates are vertices of the arrangement (``kind="vertices"``) or points
just inside every cell around each vertex (``kind="cells"``, used when some
constraints are strict).  Each round queries an approximate centerpoint of
the surviving candidates and discards those the returned halfspace rules out.

With ``mode="auto"`` the candidate set is never built in full while it is
large: candidates are drawn at random from vertices of the planes crossing
the current committed region, and only once the region is crossed by few
planes is the set enumerated.  ``mode="explicit"`` enumerates all vertices
up front and refuses beyond ``vertex_cap``.
"""
from __future__ import annotations

import math
from itertools import combinations, product

import numpy as np

from .. import config
from ..geom import (CommittedHalfspace, ConvexPolygon, Hyperplane, Polytope3, approx_centerpoint,
                    clip_polygon_rows, intersect_planes, plane_arrays)
from ..lp import max_slack_point
from .result import CapacityError, QuerySession, SolverDiagnostic, UlpResult, certify_infeasible

NUDGE = 1e-7


class _Region:
    """The box cut by every committed halfspace so far."""

    def __init__(self, dim: int):
        self.dim = dim
        M = config.TOL.box
        self.poly = ConvexPolygon.box(M) if dim == 2 else Polytope3.box(M)
        eye = np.eye(dim)
        self.A = np.vstack([eye, -eye])
        self.b = np.full(2 * dim, -M)

    def clip(self, h: CommittedHalfspace):
        a, b = h.row
        self.A = np.vstack([self.A, a])
        self.b = np.append(self.b, b)
        if self.dim == 2:
            self.poly = clip_polygon_rows(self.poly, a, b)
        else:
            self.poly = self.poly.clip(a, b)

    @property
    def vertices(self) -> np.ndarray:
        return self.poly.vertices

    @property
    def empty(self) -> bool:
        return len(self.poly.vertices) == 0

    def facets(self) -> tuple[np.ndarray, np.ndarray]:
        if self.dim == 2:
            if len(self.poly.vertices) < 3:
                return np.zeros((0, 2)), np.zeros(0)
            return self.poly.halfspace_rows()
        inc = self.poly.incidence
        rows = self.poly.rows
        live = [j for j in range(inc.shape[1]) if inc[:, j].sum() >= 3]
        if not live:
            return np.zeros((0, 3)), np.zeros(0)
        return np.array([rows[j][0] for j in live]), np.array([rows[j][1] for j in live])

    def inside(self, P: np.ndarray, tol: float) -> np.ndarray:
        if len(P) == 0:
            return np.zeros(0, dtype=bool)
        return np.all(P @ self.A.T - self.b >= -tol, axis=1)


def _crossing(N, o, V, tol):
    if len(V) == 0 or len(N) == 0:
        return np.zeros(len(N), dtype=bool)
    vals = N @ V.T - o[:, None]
    return (vals.max(axis=1) > tol) & (vals.min(axis=1) < -tol)


def _nudges(inv: np.ndarray, signs: np.ndarray) -> np.ndarray:
    """Offsets moving a vertex to signed distance ``NUDGE * s`` from each defining plane
    (``inv`` holds the inverses of the defining unit-normal matrices)."""
    return NUDGE * np.einsum("mij,mj->mi", inv, signs)


def _enumerate(N, o, region: _Region, kind: str, tol: float) -> np.ndarray:
    d = N.shape[1]
    if len(N) < d:
        return np.zeros((0, d))
    combos = np.array(list(combinations(range(len(N)), d)))
    pts, ok, inv = intersect_planes(N, o, combos, with_inverse=True)
    pts, inv = pts[ok], inv[ok]
    if kind == "cells" and len(pts):
        signs = np.array(list(product((-1.0, 1.0), repeat=d)))
        out = [pts + _nudges(inv, np.broadcast_to(s, (len(pts), d))) for s in signs]
        pts = np.vstack(out)
    return pts[region.inside(pts, tol)]


def _sample(N, o, region: _Region, kind: str, tol: float, size: int, rng) -> np.ndarray:
    d = N.shape[1]
    P = len(N)
    if P < d:
        return np.zeros((0, d))
    got, tries = [], 0
    batch = 4 * size
    while sum(len(g) for g in got) < size and tries < 12:
        tries += 1
        idx = rng.integers(0, P, size=(batch, d))
        idx.sort(axis=1)
        distinct = np.all(np.diff(idx, axis=1) > 0, axis=1)
        idx = idx[distinct]
        pts, ok, inv = intersect_planes(N, o, idx, with_inverse=True)
        pts, inv = pts[ok], inv[ok]
        if kind == "cells" and len(pts):
            signs = rng.choice((-1.0, 1.0), size=(len(pts), d))
            pts = pts + _nudges(inv, signs)
        got.append(pts[region.inside(pts, tol)])
    out = np.vstack(got) if got else np.zeros((0, d))
    return out[:size]


def _as_arrays(planes):
    if isinstance(planes, tuple) and len(planes) == 2 and isinstance(planes[0], np.ndarray):
        return planes
    planes = list(planes)
    if not planes:
        return None
    return plane_arrays(planes)


def solve_ulp_centerpoint(planes, oracle, dim: int, vertex_cap: int = 2_000_000, *,
                          kind: str = "vertices", mode: str = "auto", rng_seed=None,
                          committed=(), initial_queries=(), explicit_cap: int = 20_000,
                          sample_size: int = 1024, c_small: float = 0.1,
                          max_queries: int | None = None, session: QuerySession | None = None) -> UlpResult:
    """Solve an undecided LP by centerpoint queries over arrangement candidates.

    ``planes`` is a list of :class:`Hyperplane` (or a ``(normals, offsets)``
    pair of arrays); ``oracle`` exposes ``separation(point)``.
    """
    if dim not in (2, 3):
        raise ValueError("the centerpoint solver handles dimension 2 or 3")
    if kind not in ("vertices", "cells"):
        raise ValueError("kind must be 'vertices' or 'cells'")
    if mode not in ("auto", "explicit"):
        raise ValueError("mode must be 'auto' or 'explicit'")
    rng = np.random.default_rng(rng_seed)
    tol = config.TOL.side
    arrs = _as_arrays(planes)
    N, o = arrs if arrs is not None else (np.zeros((0, dim)), np.zeros(0))
    n = len(N)
    mult = 2 ** dim if kind == "cells" else 1
    session = session or QuerySession(oracle, dim)
    start = session.queries
    region = _Region(dim)
    for h in committed:
        session.commit(h)
    for h in session.committed:
        region.clip(h)
    # cells-mode candidates lie strictly inside the cells, so a candidate on a
    # returned plane is already ruled out
    drop_at = tol if kind == "cells" else -tol
    M = config.TOL.box
    total = math.comb(n + 2 * dim, dim) * mult
    threshold = max(dim + 2, int(c_small * dim * dim * math.log(max(total, 2))))
    stats = {"rounds": 0, "sampled_rounds": 0, "explicit_candidates": 0}
    cap = max_queries if max_queries is not None else 40 * (int(math.log2(max(total, 2))) + 10)

    def finish_infeasible():
        res = certify_infeasible(session)
        if res is None:
            raise SolverDiagnostic("committed set stayed LP-feasible after all candidates were ruled out")
        res.stats.update(stats)
        return res

    def ask(p):
        h = session.query(p)
        if h is not None:
            region.clip(h)
        return h

    for p in initial_queries:
        if ask(p) is None:
            return session.feasible(p, **stats)
        if region.empty:
            return finish_infeasible()

    if mode == "explicit" and total > vertex_cap:
        raise CapacityError(f"{total} candidate vertices exceed vertex_cap={vertex_cap}; "
                            "use the cutting solver (2D) or a smaller instance")
    cand = None
    stalled = False

    while True:
        if session.queries - start > cap:
            raise SolverDiagnostic(f"centerpoint solver exceeded {cap} queries")
        if region.empty:
            return finish_infeasible()
        if cand is None:
            V = region.vertices
            cross = _crossing(N, o, V, tol)
            FA, Fb = region.facets()
            PN = np.vstack([N[cross], FA])
            Po = np.concatenate([o[cross], Fb])
            pool_count = math.comb(len(PN), dim) * mult
            if mode == "explicit" or pool_count <= explicit_cap:
                if mode == "explicit":
                    box = np.vstack([np.eye(dim), np.eye(dim)])
                    PN = np.vstack([N, box])
                    Po = np.concatenate([o, np.full(dim, -M), np.full(dim, M)])
                cand = _enumerate(PN, Po, region, kind, tol)
                if kind == "vertices" and len(V):
                    cand = np.vstack([cand, V])
                stats["explicit_candidates"] = len(cand)
                if len(cand) == 0:
                    return finish_infeasible()
                continue
            sample = _sample(PN, Po, region, kind, tol, sample_size, rng)
            if kind == "vertices":
                sample = np.vstack([sample, V])
            stats["sampled_rounds"] += 1
            if len(sample) >= dim + 2:
                c = approx_centerpoint(sample, dim, rng=rng, verify_limit=0)
            else:
                c, slack = max_slack_point(session.committed, dim)
                if c is None or slack <= 0:
                    return finish_infeasible()
            stats["rounds"] += 1
            if ask(c) is None:
                return session.feasible(c, **stats)
            continue
        # explicit candidate phase
        if len(cand) == 0:
            return finish_infeasible()
        stats["rounds"] += 1
        if len(cand) > threshold and not stalled:
            limit = 500 if dim == 2 else 100
            c = approx_centerpoint(cand, dim, rng=rng, verify_limit=limit)
            queried_member = False
        else:
            c = cand[0]
            queried_member = True
        h = ask(c)
        if h is None:
            return session.feasible(c, **stats)
        a, b = h.row
        keep = cand @ a - b >= drop_at
        if queried_member:
            keep[0] = False
        stalled = bool(keep.all())
        cand = cand[keep]
