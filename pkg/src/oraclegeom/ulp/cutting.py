"""Recursive 1/r-cutting solver for planar undecided LPs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import config
from ..geom import ConvexPolygon, clip_polygon_rows, halfspace_rows, normalize_polygon, plane_arrays
from ..lp import max_slack_point
from .oned import LineView, solve_ulp_1d
from .result import QuerySession, SolverDiagnostic, UlpResult, certify_infeasible


class CuttingError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CuttingCell:
    simplex: ConvexPolygon  # a triangle
    conflict: np.ndarray  # indices of lines crossing the interior


def split_polygon(poly: ConvexPolygon, a, b):
    """Pieces of ``poly`` on each side of ``a.x = b`` (``None`` when the line misses the interior)."""
    v = poly.vertices
    s = v @ a - b
    tol = config.TOL.side
    if s.max() <= tol or s.min() >= -tol:
        return None
    return clip_polygon_rows(poly, a, b), clip_polygon_rows(poly, -a, -b)


def fan_triangles(poly: ConvexPolygon) -> list[np.ndarray]:
    """Triangulate a convex polygon from its lowest vertex."""
    v = poly.vertices
    if len(v) < 3:
        return []
    k = int(np.lexsort((v[:, 0], v[:, 1]))[0])
    v = np.roll(v, -k, axis=0)
    return [np.array([v[0], v[i], v[i + 1]]) for i in range(1, len(v) - 1)]


def crossing_matrix(tris: np.ndarray, N: np.ndarray, o: np.ndarray, tol: float) -> np.ndarray:
    """(cells, lines) mask of lines crossing each triangle's interior."""
    T = len(tris)
    if T == 0 or len(N) == 0:
        return np.zeros((T, len(N)), dtype=bool)
    vals = (tris.reshape(-1, 2) @ N.T - o).reshape(T, 3, len(N))
    return (vals.max(axis=1) > tol) & (vals.min(axis=1) < -tol)


def _split_list(v, a0, a1, b, tol):
    """Split a ccw vertex list by ``a.x = b``; plain floats for speed on tiny polygons."""
    s = [a0 * x + a1 * y - b for x, y in v]
    if max(s) <= tol or min(s) >= -tol:
        return None
    pos, neg = [], []
    k = len(v)
    for i in range(k):
        j = i + 1 if i + 1 < k else 0
        si, sj = s[i], s[j]
        if si >= -tol:
            pos.append(v[i])
        if si <= tol:
            neg.append(v[i])
        if (si > tol and sj < -tol) or (si < -tol and sj > tol):
            t = si / (si - sj)
            x = v[i][0] + t * (v[j][0] - v[i][0])
            y = v[i][1] + t * (v[j][1] - v[i][1])
            pos.append((x, y))
            neg.append((x, y))
    return pos, neg


def _area2(v):
    a = 0.0
    k = len(v)
    for i in range(k):
        x0, y0 = v[i]
        x1, y1 = v[i + 1 if i + 1 < k else 0]
        a += x0 * y1 - x1 * y0
    return a


def _solid(v, tol):
    if len(v) < 3:
        return False
    xs = [p[0] for p in v]
    ys = [p[1] for p in v]
    diam = max(max(xs) - min(xs), max(ys) - min(ys))
    return 0.5 * _area2(v) > tol * max(diam, tol)


def arrangement_faces(region: ConvexPolygon, N: np.ndarray, o: np.ndarray) -> list[ConvexPolygon]:
    """Faces of the arrangement of the given lines inside a convex region."""
    tol = config.TOL.side
    faces = [[tuple(p) for p in region.vertices]]
    for (a0, a1), b in zip(N.tolist(), o.tolist()):
        nxt = []
        for f in faces:
            parts = _split_list(f, a0, a1, b, tol)
            if parts is None:
                nxt.append(f)
            else:
                nxt.extend(p for p in parts if _solid(p, tol))
        faces = nxt
    out = []
    for f in faces:
        w = normalize_polygon(np.array(f))
        if len(w) >= 3:
            out.append(ConvexPolygon(w))
    return out


def build_cutting_2d(lines, r: int = 4, rng_seed=None, *, region: ConvexPolygon | None = None,
                     c_cut: float = 3.0, max_attempts: int = 20, rng=None) -> list[CuttingCell]:
    """Triangles tiling ``region`` (default: the bounding box), each crossed by at most ``n / r`` lines.

    A random sample of about ``c_cut * r * ln r`` lines is arranged and
    bottom-vertex triangulated; cells that still see too many lines are
    refined with a sample of their own conflict lists.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    if rng is None:
        rng = np.random.default_rng(rng_seed)
    if isinstance(lines, tuple):
        N, o = lines
    else:
        N, o = plane_arrays(list(lines)) if len(lines) else (np.zeros((0, 2)), np.zeros(0))
    region = ConvexPolygon.box() if region is None else region
    n = len(N)
    tol = config.TOL.side
    limit = n / r
    s = max(2, min(n, int(math.ceil(c_cut * r * math.log(r)))))
    for _ in range(max_attempts):
        pick = rng.choice(n, size=s, replace=False) if n > s else np.arange(n)
        faces = arrangement_faces(region, N[pick], o[pick])
        everyone = np.arange(n)
        work = [(t, everyone) for f in faces for t in fan_triangles(f)]
        cells: list[CuttingCell] = []
        failed = False
        rounds = 0
        while work and not failed:
            rounds += 1
            if rounds > 64:
                failed = True
                break
            nxt = []
            # group triangles sharing a candidate list to test them in one product
            groups: dict[int, list] = {}
            for t, cand in work:
                groups.setdefault(id(cand), [cand, []])[1].append(t)
            for cand, ts in groups.values():
                T = np.array(ts)
                C = crossing_matrix(T, N[cand], o[cand], tol)
                for t, row in zip(T, C):
                    conf = cand[row]
                    if len(conf) <= limit:
                        cells.append(CuttingCell(ConvexPolygon(t), conf))
                        continue
                    sub = conf if len(conf) <= s else rng.choice(conf, size=s, replace=False)
                    pieces = arrangement_faces(ConvexPolygon(t), N[sub], o[sub])
                    if len(pieces) <= 1:
                        failed = True
                        break
                    nxt.extend((tt, conf) for f in pieces for tt in fan_triangles(f))
                if failed:
                    break
            work = nxt
        if not failed:
            return cells
    raise CuttingError("could not build a cutting within the attempt budget (degenerate input?)")


def _segment_clip(p0, p1, A, b) -> tuple[float, float]:
    """Parameter range of ``p0 + t (p1 - p0)``, t in [0, 1], satisfying ``A x >= b``."""
    d = p1 - p0
    num = b - A @ p0
    den = A @ d
    lo, hi = 0.0, 1.0
    tol = config.TOL.side
    par = np.abs(den) <= 1e-15
    if np.any(par & (num > tol)):
        return 1.0, 0.0
    pos, neg = den > 1e-15, den < -1e-15
    if pos.any():
        lo = max(lo, float(np.max(num[pos] / den[pos])))
    if neg.any():
        hi = min(hi, float(np.min(num[neg] / den[neg])))
    return lo, hi


def solve_ulp_cutting_2d(lines, oracle, r: int = 4, base_size: int = 8, rng_seed=None, *,
                         c_cut: float = 3.0, session: QuerySession | None = None) -> UlpResult:
    """Recursive cutting solver.

    Per level: build a cutting of the current cell, solve the induced 1D
    problem on cell edges near the committed region until that region sits
    inside one cell, then recurse into it with the cell's conflict lines.
    """
    rng = np.random.default_rng(rng_seed)
    lines = list(lines)
    N, o = plane_arrays(lines) if lines else (np.zeros((0, 2)), np.zeros(0))
    session = session or QuerySession(oracle, 2)
    stats = {"levels": 0, "edges_solved": 0, "base_faces": 0}
    tol = config.TOL.side
    M = config.TOL.box

    def committed_rows():
        A, b = halfspace_rows(session.committed, 2)
        eye = np.eye(2)
        return np.vstack([A, eye, -eye]), np.concatenate([b, np.full(4, -M)])

    def done_infeasible():
        res = certify_infeasible(session)
        if res is None:
            raise SolverDiagnostic("cutting solver: committed set remained LP-feasible at termination")
        res.stats.update(stats)
        return res

    def base_case(idx, region: ConvexPolygon):
        A, b = committed_rows()
        poly = region
        for a_, b_ in zip(A, b):
            poly = clip_polygon_rows(poly, a_, b_)
        if not poly.has_interior():
            return None
        faces = arrangement_faces(poly, N[idx], o[idx]) if len(idx) else [poly]
        while faces:
            f = faces.pop(0)
            stats["base_faces"] += 1
            p = f.centroid()
            h = session.query(p)
            if h is None:
                return session.feasible(p, **stats)
            a_, b_ = h.row
            faces = [g for g in (clip_polygon_rows(g, a_, b_) for g in faces) if g.has_interior()]
        return None

    idx = np.arange(len(N))
    region = ConvexPolygon.box(M)
    while True:
        stats["levels"] += 1
        if len(idx) <= base_size:
            res = base_case(idx, region)
            return res if res is not None else done_infeasible()
        cells = build_cutting_2d((N[idx], o[idx]), r, rng=rng, region=region, c_cut=c_cut)
        tris = np.array([c.simplex.vertices for c in cells])
        done: set = set()
        while True:
            x, slack = max_slack_point(session.committed, 2)
            if x is None or slack <= tol:
                return done_infeasible()
            inside = _locate(tris, x)
            if inside < 0:
                raise SolverDiagnostic(f"cutting solver: no cell contains the slack point {x}")
            T = tris[inside]
            pending = []
            for k in range(3):
                key = _edge_key(T[k], T[(k + 1) % 3])
                if key not in done:
                    pending.append((key, T[k], T[(k + 1) % 3]))
            if not pending:
                break
            for key, p0, p1 in pending:
                done.add(key)
                A, b = committed_rows()
                t0, t1 = _segment_clip(p0, p1, A, b)
                if t0 > t1:
                    continue
                view = LineView(p0, p1 - p0)
                den = N[idx] @ view.direction
                ok = np.abs(den) > 1e-15
                tt = (o[idx][ok] - N[idx][ok] @ view.origin) / den[ok]
                bounds = tt[(tt > t0) & (tt < t1)]
                stats["edges_solved"] += 1
                res = solve_ulp_1d(bounds, oracle, line=view, lo=t0, hi=t1, session=session)
                if res.feasible:
                    res.stats.update(stats)
                    return res
        cell = cells[inside]
        idx = idx[cell.conflict]
        region = cell.simplex


def _edge_key(p, q):
    a = tuple(np.round(p, 9))
    b = tuple(np.round(q, 9))
    return (a, b) if a <= b else (b, a)


def _locate(tris: np.ndarray, x: np.ndarray) -> int:
    """Index of the triangle containing ``x`` most deeply (-1 if none)."""
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    best, arg = -np.inf, -1
    depth = np.full(len(tris), np.inf)
    orient = np.sign((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    for u, v in ((a, b), (b, c), (c, a)):
        e = v - u
        cr = orient * (e[:, 0] * (x[1] - u[:, 1]) - e[:, 1] * (x[0] - u[:, 0])) / np.linalg.norm(e, axis=1)
        depth = np.minimum(depth, cr)
    arg = int(np.argmax(depth))
    if depth[arg] < -config.TOL.side * 10:
        return -1
    return arg
