"""Binary search for undecided LPs on a line."""
from __future__ import annotations

import numpy as np

from .. import config
from ..geom import CommittedHalfspace
from .result import QuerySession, UlpResult


class LineView:
    """Parametrizes the line ``origin + t * direction`` and restricts
    ambient halfspaces to it as ``coef * t >= rhs``."""

    def __init__(self, origin, direction):
        self.origin = np.asarray(origin, dtype=np.float64)
        self.direction = np.asarray(direction, dtype=np.float64)

    def point(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction

    def restrict(self, h: CommittedHalfspace) -> tuple[float, float]:
        n = h.side * h.plane.normal
        return float(n @ self.direction), float(h.side * h.plane.offset - n @ self.origin)

    def crossing(self, normal, offset) -> float | None:
        den = float(normal @ self.direction)
        if abs(den) <= 1e-15:
            return None
        return float(offset - normal @ self.origin) / den


def solve_ulp_1d(boundaries, oracle, *, line: LineView | None = None, lo: float | None = None,
                 hi: float | None = None, session: QuerySession | None = None) -> UlpResult:
    """Find a feasible parameter in ``[lo, hi]`` by querying median atomic intervals.

    ``boundaries`` are parameters where constraints cross the line.  Uses at
    most ``floor(log2(n + 1)) + 2`` queries.
    """
    M = config.TOL.box
    if line is None:
        line = LineView(np.zeros(1), np.ones(1))
    lo = -M if lo is None else float(lo)
    hi = M if hi is None else float(hi)
    if session is None:
        session = QuerySession(oracle, len(line.origin))
    start_q = session.queries
    eps_t = 1e-12 * max(1.0, abs(lo), abs(hi))
    b = np.unique(np.asarray(list(boundaries), dtype=np.float64))
    b = b[(b > lo + eps_t) & (b < hi - eps_t)]
    if len(b) > 1:
        keep = np.concatenate([[True], np.diff(b) > eps_t])
        b = b[keep]
    edges = np.concatenate([[lo], b, [hi]])
    flo, fhi = lo, hi
    alive = np.arange(len(edges) - 1)
    tried_point = False
    while True:
        if len(alive) == 0:
            if tried_point or flo > fhi + eps_t:
                return _done(session, start_q, None)
            t = 0.5 * (flo + fhi)
            tried_point = True
        else:
            j = alive[len(alive) // 2]
            a, c = max(edges[j], flo), min(edges[j + 1], fhi)
            t = 0.5 * (a + c)
        h = session.query(line.point(t))
        if h is None:
            return _done(session, start_q, t, line)
        coef, rhs = line.restrict(h)
        if abs(coef) <= 1e-15:
            flo, fhi = np.inf, -np.inf
        elif coef > 0:
            flo = max(flo, rhs / coef)
        else:
            fhi = min(fhi, rhs / coef)
        alive = alive[(edges[alive + 1] > flo + eps_t) & (edges[alive] < fhi - eps_t)]


def _done(session, start_q, t, line=None) -> UlpResult:
    used = session.queries - start_q
    if t is None:
        res = session.infeasible(queries_1d=used)
    else:
        res = session.feasible(line.point(t), t=float(t), queries_1d=used)
    return res
