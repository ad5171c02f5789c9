"""Planar undecided LP with both separation and labeling oracles."""
from __future__ import annotations

import numpy as np

from .. import config
from ..geom import ConvexPolygon, clip_polygon_rows, plane_arrays
from .reduce import Feasible, reduce_polygon
from .result import QuerySession, SolverDiagnostic, UlpResult, certify_infeasible


def solve_ulp_seplab_2d(lines, oracle, rng_seed=None, *, s_net: int = 40, max_edges: int = 10,
                        session: QuerySession | None = None) -> UlpResult:
    """Label a random sample of the lines crossing the current polygon, cut the
    polygon by the revealed halfplanes, keep it small with oracle-driven
    reduction, and repeat until no line crosses it; one separation query then decides.

    ``oracle`` needs ``separation(point)`` and ``label(index)``.
    """
    rng = np.random.default_rng(rng_seed)
    lines = list(lines)
    N, o = plane_arrays(lines) if lines else (np.zeros((0, 2)), np.zeros(0))
    session = session or QuerySession(oracle, 2)
    tol = config.TOL.side
    poly = ConvexPolygon.box()
    L = np.arange(len(N))
    sizes = [len(L)]
    stats = {"crossing_sizes": sizes, "labels": 0, "rounds": 0}

    def infeasible():
        res = certify_infeasible(session)
        if res is None:
            raise SolverDiagnostic("seplab: committed set remained LP-feasible")
        res.stats.update(stats)
        return res

    while True:
        if not poly.has_interior():
            return infeasible()
        if len(L) == 0:
            p = poly.centroid()
            h = session.query(p)
            if h is None:
                return session.feasible(p, **stats)
            poly = clip_polygon_rows(poly, *h.row)
            continue
        stats["rounds"] += 1
        S = L if len(L) <= s_net else rng.choice(L, size=s_net, replace=False)
        for i in S:
            h = oracle.label(int(i))
            stats["labels"] += 1
            session.commit(h)
            poly = clip_polygon_rows(poly, *h.row)
        if not poly.has_interior():
            return infeasible()
        if len(poly.vertices) > max_edges:
            red = reduce_polygon(poly, oracle, rng=rng, max_edges=max_edges, session=session)
            if isinstance(red, Feasible):
                return session.feasible(red.point, **stats)
            poly = red
            if not poly.has_interior():
                return infeasible()
        V = poly.vertices
        vals = N[L] @ V.T - o[L][:, None]
        L = L[(vals.max(axis=1) > tol) & (vals.min(axis=1) < -tol)]
        sizes.append(len(L))
