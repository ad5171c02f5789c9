"""Numeric-geometric primitives shared by the solvers and learners.

Points are plain 1-d float64 numpy arrays.  Hyperplanes are stored with a
unit normal; a committed halfspace is the closed side ``side * (n.x - o) >= 0``.
All tolerances come from :mod:`oraclegeom.config`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import config, kernels


class ContractError(ValueError):
    """Raised when an operation's precondition is violated."""


def as_point(p, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise ContractError(f"expected a {dim}-dimensional point, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("point coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The locus ``normal . x = offset``; normalized on construction."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64).reshape(-1)
        norm = float(np.linalg.norm(n))
        if norm == 0.0 or not math.isfinite(norm):
            raise ContractError("hyperplane normal must be a nonzero finite vector")
        object.__setattr__(self, "normal", n / norm)
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def value(self, p) -> float:
        return float(self.normal @ as_point(p, self.dim) - self.offset)

    def negated(self) -> "Hyperplane":
        return Hyperplane(-self.normal, -self.offset)

    def __repr__(self):
        n = ", ".join(f"{v:.6g}" for v in self.normal)
        return f"Hyperplane(({n}), {self.offset:.6g})"


@dataclass(frozen=True, eq=False)
class CommittedHalfspace:
    plane: Hyperplane
    side: int
    index: int | None = None  # constraint index in the originating instance

    def __post_init__(self):
        if self.side not in (1, -1):
            raise ContractError("side must be +1 or -1")

    @property
    def row(self) -> tuple[np.ndarray, float]:
        """``(a, b)`` with the feasible side ``a . x >= b``."""
        return self.side * self.plane.normal, self.side * self.plane.offset

    def slack(self, p) -> float:
        return self.side * self.plane.value(p)

    def contains(self, p) -> bool:
        return self.slack(p) >= -config.TOL.side

    def __repr__(self):
        return f"CommittedHalfspace({self.plane!r}, side={self.side:+d}, index={self.index})"


def halfspace_rows(hs: Sequence[CommittedHalfspace], dim: int) -> tuple[np.ndarray, np.ndarray]:
    if not hs:
        return np.zeros((0, dim)), np.zeros(0)
    A = np.array([h.side * h.plane.normal for h in hs])
    b = np.array([h.side * h.plane.offset for h in hs])
    return A, b


def box_halfspaces(dim: int, M: float | None = None) -> list[CommittedHalfspace]:
    M = config.TOL.box if M is None else M
    out = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        out.append(CommittedHalfspace(Hyperplane(e, -M), 1))
        out.append(CommittedHalfspace(Hyperplane(e, M), -1))
    return out


def side_of(plane: Hyperplane, p) -> int:
    """Sign of ``normal . p - offset`` with a ``TOL.side`` band reported as 0."""
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if p.shape[0] != plane.dim:
        raise ContractError(f"dimension mismatch: plane {plane.dim}, point {p.shape[0]}")
    v = float(plane.normal @ p - plane.offset)
    if abs(v) <= config.TOL.side:
        return 0
    return 1 if v > 0 else -1


def plane_arrays(planes: Sequence[Hyperplane]) -> tuple[np.ndarray, np.ndarray]:
    if len(planes) == 0:
        return np.zeros((0, 0)), np.zeros(0)
    return np.array([h.normal for h in planes]), np.array([h.offset for h in planes])


def batch_inverse(mats: np.ndarray, eps: float = 1e-12):
    """Inverses of a stack of 2x2 or 3x3 matrices via adjugates.

    Returns ``(inv, ok)``; rows with ``|det| <= eps`` are flagged and hold zeros.
    """
    d = mats.shape[-1]
    if d == 2:
        a, b, c, e = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
        det = a * e - b * c
        adj = np.stack([np.stack([e, -b], -1), np.stack([-c, a], -1)], 1)
    elif d == 3:
        r0, r1, r2 = mats[:, 0], mats[:, 1], mats[:, 2]
        c0, c1, c2 = np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)
        det = (r0 * c0).sum(axis=1)
        adj = np.stack([c0, c1, c2], axis=2)  # columns are the cofactor rows
    else:
        det = np.linalg.det(mats)
        ok = np.abs(det) > eps
        inv = np.zeros_like(mats)
        if ok.any():
            inv[ok] = np.linalg.inv(mats[ok])
        return inv, ok
    ok = np.abs(det) > eps
    inv = adj / np.where(ok, det, 1.0)[:, None, None]
    inv[~ok] = 0.0
    return inv, ok


def intersect_planes(N: np.ndarray, o: np.ndarray, combos: np.ndarray, *, with_inverse: bool = False):
    """Intersection points of d-tuples of planes.

    ``combos`` is an (m, d) index array.  Returns ``(points, ok)`` where ``ok``
    flags non-degenerate tuples (the others hold garbage); ``with_inverse``
    appends the stacked inverse matrices.
    """
    d = N.shape[1]
    if len(combos) == 0:
        empty = (np.zeros((0, d)), np.zeros(0, dtype=bool))
        return empty + (np.zeros((0, d, d)),) if with_inverse else empty
    inv, ok = batch_inverse(N[combos])
    pts = np.einsum("mij,mj->mi", inv, o[combos])
    return (pts, ok, inv) if with_inverse else (pts, ok)


def dedup_points(P: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Keep the first of every cluster of points closer than ``tol`` (grid hashing)."""
    tol = config.TOL.dedup if tol is None else tol
    if len(P) == 0:
        return P
    keys = np.floor(P / tol).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    cand = P[np.sort(first)]
    # neighbors across a grid boundary
    keep = []
    for p in cand:
        if all(np.max(np.abs(p - q)) > tol for q in keep[-64:]):
            keep.append(p)
    return np.array(keep).reshape(-1, P.shape[1])


def arrangement_vertices_2d(lines: Sequence[Hyperplane]) -> list[np.ndarray]:
    """All pairwise intersection points of 2D lines, deduplicated."""
    if len(lines) < 2:
        return []
    for h in lines:
        if h.dim != 2:
            raise ContractError("arrangement_vertices_2d needs 2D lines")
    N, o = plane_arrays(lines)
    combos = np.array(list(combinations(range(len(lines)), 2)))
    pts, ok = intersect_planes(N, o, combos)
    pts = pts[ok]
    if len(pts) == 0:
        return []
    uniq = _dedup_exact(pts, config.TOL.dedup)
    return [p for p in uniq]


def _dedup_exact(P: np.ndarray, tol: float) -> np.ndarray:
    order = np.lexsort(P.T[::-1])
    P = P[order]
    keep = [P[0]]
    for p in P[1:]:
        if not any(np.max(np.abs(p - q)) <= tol for q in keep[-32:]):
            keep.append(p)
    return np.array(keep)


# ---------------------------------------------------------------- polygons


def _cross2(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Counterclockwise convex polygon; fewer than 3 vertices means degenerate or empty."""

    vertices: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    degenerate: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def box(cls, M: float | None = None) -> "ConvexPolygon":
        M = config.TOL.box if M is None else M
        return cls(np.array([[-M, -M], [M, -M], [M, M], [-M, M]]))

    def __len__(self):
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def area(self) -> float:
        v = self.vertices
        if len(v) < 3:
            return 0.0
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def has_interior(self, tol: float | None = None) -> bool:
        if len(self.vertices) < 3:
            return False
        tol = config.TOL.side if tol is None else tol
        diam = float(np.ptp(self.vertices, axis=0).max())
        return self.area > tol * max(diam, tol)

    def centroid(self) -> np.ndarray:
        v = self.vertices
        if len(v) < 3:
            return v.mean(axis=0) if len(v) else np.zeros(2)
        x, y = v[:, 0], v[:, 1]
        x1, y1 = np.roll(x, -1), np.roll(y, -1)
        cr = x * y1 - x1 * y
        a = cr.sum() / 2.0
        if abs(a) <= 1e-300:
            return v.mean(axis=0)
        return np.array([((x + x1) * cr).sum() / (6 * a), ((y + y1) * cr).sum() / (6 * a)])

    def edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def halfspace_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows ``(A, b)`` with interior ``A x >= b`` (unit normals)."""
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        e = w - v
        n = np.stack([-e[:, 1], e[:, 0]], axis=1)
        n /= np.linalg.norm(n, axis=1)[:, None]
        return n, (n * v).sum(axis=1)

    def contains(self, P, tol: float | None = None) -> np.ndarray:
        tol = config.TOL.side if tol is None else tol
        P = np.atleast_2d(np.asarray(P, dtype=np.float64))
        if len(self.vertices) < 3:
            return np.zeros(len(P), dtype=bool)
        A, b = self.halfspace_rows()
        return np.all(P @ A.T - b >= -tol, axis=1)


def normalize_polygon(v: np.ndarray) -> np.ndarray:
    """Drop repeated and collinear vertices from a ccw vertex cycle."""
    tol = config.TOL.dedup
    if len(v) == 0:
        return v.reshape(0, 2)
    out = []
    for p in v:
        if not out or np.max(np.abs(p - out[-1])) > tol:
            out.append(p)
    while len(out) > 1 and np.max(np.abs(out[0] - out[-1])) <= tol:
        out.pop()
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            la = np.linalg.norm(b - a)
            lc = np.linalg.norm(c - b)
            if abs(_cross2(a, b, c)) <= 1e-12 * la * lc:
                out.pop(i)
                changed = True
                break
    return np.array(out).reshape(-1, 2)


def clip_polygon(poly: ConvexPolygon, h: CommittedHalfspace) -> ConvexPolygon:
    """Intersect a convex polygon with a closed halfplane."""
    if h.plane.dim != 2:
        raise ContractError("clip_polygon needs a 2D halfspace")
    return clip_polygon_rows(poly, h.side * h.plane.normal, h.side * h.plane.offset)


def clip_polygon_rows(poly: ConvexPolygon, a: np.ndarray, b: float) -> ConvexPolygon:
    v = poly.vertices
    if len(v) == 0:
        return poly
    tol = config.TOL.side
    s = v @ a - b
    if np.all(s >= -tol):
        return poly
    if np.all(s < -tol):
        return ConvexPolygon()
    out = []
    k = len(v)
    for i in range(k):
        j = (i + 1) % k
        if s[i] >= -tol:
            out.append(v[i])
        if (s[i] > tol and s[j] < -tol) or (s[i] < -tol and s[j] > tol):
            t = s[i] / (s[i] - s[j])
            out.append(v[i] + t * (v[j] - v[i]))
    w = normalize_polygon(np.array(out))
    return ConvexPolygon(w, degenerate=len(w) < 3)


# ---------------------------------------------------------------- 3D polytopes


@dataclass(frozen=True, eq=False)
class Polytope3:
    """Convex polytope kept as vertices plus vertex/facet incidences.

    ``rows`` maps a facet id to ``(a, b)`` with interior ``a . x >= b``.
    """

    vertices: np.ndarray
    incidence: np.ndarray  # (k, F) bool
    rows: tuple = ()

    @classmethod
    def box(cls, M: float | None = None) -> "Polytope3":
        M = config.TOL.box if M is None else M
        corners = np.array([[sx, sy, sz] for sx in (-M, M) for sy in (-M, M) for sz in (-M, M)])
        rows = []
        inc = np.zeros((8, 6), dtype=bool)
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = 1.0
            rows.append((e, -M))
            rows.append((-e, -M))
            inc[:, 2 * axis] = corners[:, axis] == -M
            inc[:, 2 * axis + 1] = corners[:, axis] == M
        return cls(corners, inc, tuple(rows))

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def has_interior(self) -> bool:
        V = self.vertices
        if len(V) < 4:
            return False
        D = V - V.mean(axis=0)
        s = np.linalg.svd(D, compute_uv=False)
        return s[-1] > 1e-9 * max(s[0], 1e-300)

    def clip(self, a: np.ndarray, b: float) -> "Polytope3":
        tol = config.TOL.side
        V = self.vertices
        if len(V) == 0:
            return self
        s = V @ a - b
        out = s < -tol
        if not out.any():
            return self
        inside = s > tol
        if not inside.any():
            return Polytope3(np.zeros((0, 3)), np.zeros((0, 0), dtype=bool), self.rows)
        on = ~inside & ~out
        F = self.incidence.shape[1]
        inc_in = self.incidence[inside].astype(np.int32)
        inc_out = self.incidence[out].astype(np.int32)
        shared = inc_in @ inc_out.T
        iu, iw = np.nonzero(shared >= 2)
        Vin, Vout = V[inside], V[out]
        sin, sout = s[inside], s[out]
        t = sin[iu] / (sin[iu] - sout[iw])
        newV = Vin[iu] + t[:, None] * (Vout[iw] - Vin[iu])
        newI = self.incidence[inside][iu] & self.incidence[out][iw]
        keepV = V[inside | on]
        keepI = self.incidence[inside | on]
        onmask = on[inside | on]
        allV = np.vstack([keepV, newV])
        allI = np.vstack([keepI, newI])
        col = np.zeros((len(allV), 1), dtype=bool)
        col[: len(keepV)][onmask] = True
        col[len(keepV):] = True
        allI = np.hstack([allI, col])
        allV, allI = _merge_close(allV, allI)
        return Polytope3(allV, allI, self.rows + ((a, b),))


def _merge_close(V, I):
    tol = config.TOL.dedup
    keepV, keepI = [], []
    for v, inc in zip(V, I):
        for idx, w in enumerate(keepV):
            if np.max(np.abs(v - w)) <= tol:
                keepI[idx] = keepI[idx] | inc
                break
        else:
            keepV.append(v)
            keepI.append(inc.copy())
    return np.array(keepV).reshape(-1, 3), np.array(keepI).reshape(len(keepV), -1)


# ---------------------------------------------------------------- triangles


@dataclass(frozen=True, eq=False)
class Triangle2:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_point(getattr(self, name), 2))

    @classmethod
    def from_array(cls, T) -> "Triangle2":
        T = np.asarray(T, dtype=np.float64).reshape(3, 2)
        return cls(T[0], T[1], T[2])

    @classmethod
    def probe(cls, p, size: float | None = None) -> "Triangle2":
        """Tiny axis-aligned triangle centered at ``p``."""
        h = (config.TOL.dedup if size is None else size) / 2.0
        p = as_point(p, 2)
        return cls(p + [-h, -h], p + [h, -h], p + [0.0, h])

    @property
    def vertices(self) -> np.ndarray:
        return np.stack([self.a, self.b, self.c])

    @property
    def signed_area(self) -> float:
        return 0.5 * _cross2(self.a, self.b, self.c)

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    def is_degenerate(self) -> bool:
        v = self.vertices
        diam = float(np.ptp(v, axis=0).max())
        return self.area <= 1e-12 * max(diam, 1e-300) ** 2

    def contains(self, P, tol: float | None = None) -> np.ndarray:
        return triangles_contain(self.vertices[None], P, tol)[0]

    def __repr__(self):
        f = lambda p: f"({p[0]:.6g}, {p[1]:.6g})"
        return f"Triangle2({f(self.a)}, {f(self.b)}, {f(self.c)})"


def triangles_contain(T: np.ndarray, P, tol: float | None = None) -> np.ndarray:
    """Boundary-inclusive containment matrix (num triangles x num points).

    Zero-area triangles act as segment/point probes.
    """
    tol = config.TOL.side if tol is None else tol
    T = np.asarray(T, dtype=np.float64).reshape(-1, 3, 2)
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    if len(T) == 0 or len(P) == 0:
        return np.zeros((len(T), len(P)), dtype=bool)
    a, b, c = T[:, 0], T[:, 1], T[:, 2]
    orient = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    sgn = np.where(orient >= 0, 1.0, -1.0)
    out = np.ones((len(T), len(P)), dtype=bool)
    diam = np.max(np.ptp(T, axis=1), axis=1)
    degen = np.abs(orient) <= 1e-12 * np.maximum(diam, 1e-300) ** 2
    for u, v in ((a, b), (b, c), (c, a)):
        e = v - u
        le = np.linalg.norm(e, axis=1)
        le = np.where(le > 0, le, 1.0)
        cr = (e[:, 0, None] * (P[None, :, 1] - u[:, 1, None]) - e[:, 1, None] * (P[None, :, 0] - u[:, 0, None]))
        out &= (sgn[:, None] * cr / le[:, None]) >= -tol
    if degen.any():
        for t in np.nonzero(degen)[0]:
            out[t] = _segment_hull_contains(T[t], P, tol)
    return out


def _segment_hull_contains(tri, P, tol):
    d = ((tri[:, None, :] - tri[None, :, :]) ** 2).sum(axis=2)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    u, v = tri[i], tri[j]
    e = v - u
    L2 = float(e @ e)
    if L2 <= 1e-300:
        return np.linalg.norm(P - u, axis=1) <= tol
    t = np.clip(((P - u) @ e) / L2, 0.0, 1.0)
    return np.linalg.norm(P - (u + t[:, None] * e), axis=1) <= tol


# ---------------------------------------------------------------- hull


def convex_hull_2d(points) -> ConvexPolygon:
    """Counterclockwise hull (monotone chain); collinear points are dropped.

    Fewer than three non-collinear points yield a polygon flagged
    ``degenerate`` holding the segment endpoints or the single point.
    """
    P = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(P) == 0:
        return ConvexPolygon(degenerate=True)
    P = np.unique(P, axis=0)
    if len(P) == 1:
        return ConvexPolygon(P, degenerate=True)
    pts = [tuple(p) for p in P]
    scale = float(np.ptp(P, axis=0).max())
    eps = 1e-12 * scale * scale

    def build(seq):
        h = []
        for p in seq:
            while len(h) >= 2 and _cross2(h[-2], h[-1], p) <= eps:
                h.pop()
            h.append(p)
        return h

    lower = build(pts)
    upper = build(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        ends = np.array([pts[0], pts[-1]])
        return ConvexPolygon(ends, degenerate=True)
    return ConvexPolygon(np.array(hull))


# ---------------------------------------------------------------- centerpoints


def radon_points(groups: np.ndarray) -> np.ndarray:
    """Radon points of a batch of (d+2)-point groups, shape (G, d+2, d).

    A group with no proper affine dependence (all cofactors vanish) gets
    the centroid of its points.
    """
    G, k, d = groups.shape
    if k != d + 2:
        raise ContractError(f"a Radon group in dimension {d} needs {d + 2} points")
    M = np.concatenate([groups.transpose(0, 2, 1), np.ones((G, 1, k))], axis=1)  # (G, d+1, d+2)
    minors = np.empty((G, k))
    cols = np.arange(k)
    for i in range(k):
        sub = M[:, :, cols != i]
        minors[:, i] = ((-1) ** i) * np.linalg.det(sub)
    spread = np.ptp(groups, axis=1).max(axis=1)
    scale = np.maximum(spread, 1e-300) ** d
    degenerate = np.abs(minors).max(axis=1) <= 1e-10 * scale
    pos = np.where(minors > 0, minors, 0.0)
    wsum = pos.sum(axis=1)
    safe = np.where(wsum > 0, wsum, 1.0)
    pts = (pos[:, :, None] * groups).sum(axis=1) / safe[:, None]
    cent = groups.mean(axis=1)
    bad = degenerate | (wsum <= 0)
    pts[bad] = cent[bad]
    return pts


def radon_point(points) -> np.ndarray:
    P = np.asarray(points, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1] + 2:
        raise ContractError("radon_point needs exactly d+2 points in dimension d")
    return radon_points(P[None])[0]


def tukey_depth(points, c) -> int:
    P = np.asarray(points, dtype=np.float64)
    return int(kernels.tukey_depth(P, np.asarray(c, dtype=np.float64), config.TOL.side))


def approx_centerpoint(points, dim: int | None = None, rng_seed=None, *, rng=None,
                       eps: float = 0.02, restarts: int = 3, verify_limit: int = 500) -> np.ndarray:
    """Iterated-Radon approximate centerpoint.

    Leaves are a shuffled copy of the input (padded by resampling) arranged
    in a complete (d+2)-ary tree of depth ceil(log_{d+2} n).  When n is at
    most ``verify_limit`` the depth of the result is checked against
    ``(1/(d+1)^2 - eps) n`` and the tree is rebuilt up to ``restarts`` times.
    """
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    n, d = P.shape
    if dim is not None and dim != d:
        raise ContractError(f"points are {d}-dimensional, expected {dim}")
    if n == 0:
        raise ContractError("approx_centerpoint needs at least one point")
    if n < d + 2:
        return np.median(P, axis=0)
    if rng is None:
        rng = np.random.default_rng(rng_seed)
    k = d + 2
    depth = max(1, math.ceil(math.log(n) / math.log(k) - 1e-12))
    leaves = k ** depth
    target = (1.0 / (d + 1) ** 2 - eps) * n
    best, best_depth = None, -1
    for attempt in range(restarts + 1):
        idx = rng.permutation(n)
        if leaves > n:
            idx = np.concatenate([idx, rng.integers(0, n, leaves - n)])
        level = P[idx[:leaves]]
        while len(level) > 1:
            level = radon_points(level.reshape(-1, k, d))
        c = level[0]
        if n > verify_limit:
            return c
        dep = tukey_depth(P, c)
        if dep > best_depth:
            best, best_depth = c, dep
        if dep >= target:
            break
    return best


# ---------------------------------------------------------------- sampling


def relative_sample_size(eps: float, p: float, delta: float, vc_dim: int, c: float = 0.5) -> int:
    """Sample size for a relative (eps, p)-approximation (natural logs)."""
    for name, v in (("eps", eps), ("p", p), ("delta", delta)):
        if not 0.0 < v < 1.0:
            raise ContractError(f"{name} must lie in (0, 1), got {v}")
    if vc_dim < 1:
        raise ContractError("vc_dim must be at least 1")
    if c <= 0:
        raise ContractError("the sample constant must be positive")
    return int(math.ceil(c / (eps * eps * p) * (vc_dim * math.log(1.0 / p) + math.log(1.0 / delta)) - 1e-9))
