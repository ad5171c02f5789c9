"""Covering a hidden-color planar point set by monochromatic triangles.

The learner only sees points handed out by the uncovered-point sampler.
Every iteration draws a sample, learns the sample's colors with tiny probe
triangles, ranks candidate triangles by how much of the sample they hold,
and asks the triangle oracle about them until one comes back monochromatic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .geom import Triangle2, convex_hull_2d, relative_sample_size, triangles_contain
from .oracles import Color, Monochromatic, RegionOracle

SAMPLE_TRIPLES = "sample-triples"
LINE_TRIPLES = "line-triples"
STRATEGIES = (SAMPLE_TRIPLES, LINE_TRIPLES)
VC_DIM_TRIANGLES = 7
CHUNK = 2048  # candidates vetted per batch before oracle queries


class CoverAssumptionViolation(RuntimeError):
    """No candidate triangle validated for too many consecutive iterations."""


@dataclass
class TriangleCover:
    triangles: list  # (Triangle2, payload): payload is a Color, or a plane for terrain covers
    ledger: dict
    log: list = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.triangles)


# ---------------------------------------------------------------- candidates


def _area2(T: np.ndarray) -> np.ndarray:
    a, b, c = T[:, 0], T[:, 1], T[:, 2]
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def _solid(T: np.ndarray, scale: float) -> np.ndarray:
    return np.abs(_area2(T)) > 1e-12 * max(scale, 1e-12) ** 2


def sample_triples(points, colors=None) -> np.ndarray:
    """Vertex array (t, 3, 2) of every non-degenerate triple of same-colored points."""
    P = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    groups = [np.arange(len(P))] if colors is None else [np.flatnonzero(colors == c) for c in np.unique(colors)]
    out = []
    for g in groups:
        if len(g) < 3:
            continue
        idx = np.array(list(combinations(g.tolist(), 3)))
        out.append(P[idx])
    if not out:
        return np.zeros((0, 3, 2))
    T = np.concatenate(out)
    return T[_solid(T, float(np.ptp(P)) if len(P) else 1.0)]


def line_triples(points, budget: int = 20000, rng=None) -> np.ndarray:
    """Bounded triangles cut out by three lines through sample pairs, heaviest first, at most ``budget``."""
    P = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    m = len(P)
    if m < 2:
        return np.zeros((0, 3, 2))
    pairs = np.array(list(combinations(range(m), 2)))
    d = P[pairs[:, 1]] - P[pairs[:, 0]]
    nrm = np.c_[-d[:, 1], d[:, 0]]
    ln = np.linalg.norm(nrm, axis=1)
    keep = ln > 1e-12
    nrm = nrm[keep] / ln[keep, None]
    off = (nrm * P[pairs[keep, 0]]).sum(axis=1)
    L = len(nrm)
    if L < 3:
        return np.zeros((0, 3, 2))
    total = math.comb(L, 3)
    if total <= 4 * budget:
        trip = np.array(list(combinations(range(L), 3)))
    else:
        rng = rng or np.random.default_rng(0)
        trip = np.sort(rng.integers(0, L, size=(4 * budget, 3)), axis=1)
        trip = trip[(trip[:, 0] < trip[:, 1]) & (trip[:, 1] < trip[:, 2])]
    corners = []
    ok = np.ones(len(trip), dtype=bool)
    for a, b in ((0, 1), (1, 2), (0, 2)):
        A = np.stack([nrm[trip[:, a]], nrm[trip[:, b]]], axis=1)
        rhs = np.stack([off[trip[:, a]], off[trip[:, b]]], axis=1)
        det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
        good = np.abs(det) > 1e-12
        ok &= good
        sd = np.where(good, det, 1.0)
        x = (rhs[:, 0] * A[:, 1, 1] - A[:, 0, 1] * rhs[:, 1]) / sd
        y = (A[:, 0, 0] * rhs[:, 1] - rhs[:, 0] * A[:, 1, 0]) / sd
        corners.append(np.stack([x, y], axis=1))
    T = np.stack(corners, axis=1)[ok]
    T = T[_solid(T, float(np.ptp(P)))]
    if len(T) == 0:
        return T
    est = triangles_contain(T, P).sum(axis=1)
    order = np.argsort(-est, kind="stable")[:budget]
    return T[order]


def candidate_triangles(points, colors=None, strategy: str = SAMPLE_TRIPLES, *, budget: int = 20000,
                        rng=None) -> list[Triangle2]:
    """Candidate triangles for a labeled sample (see :func:`sample_triples` and :func:`line_triples`)."""
    if strategy == SAMPLE_TRIPLES:
        T = sample_triples(points, None if colors is None else np.asarray(colors))
    elif strategy == LINE_TRIPLES:
        T = line_triples(points, budget, rng)
    else:
        raise ValueError(f"unknown candidate strategy {strategy!r}")
    return [Triangle2.from_array(t) for t in T]


# ---------------------------------------------------------------- the loop


def triangle_sample_size(k: int, c: float) -> int:
    return max(relative_sample_size(0.25, 1.0 / (16 * k), 0.05, VC_DIM_TRIANGLES, c), 3 * k)


def _ranked(T, S, colors, k, strategy):
    """Candidates holding a heavy, single-colored part of the sample, heaviest first.

    Returns ``(triangles, colors, estimates, sample containment rows)``.
    """
    if len(T) == 0:
        return T, np.zeros(0, dtype=np.int8), np.zeros(0), np.zeros((0, len(S)), dtype=bool)
    inside = triangles_contain(T, S)
    m = len(S)
    if colors is None:
        col = np.zeros(len(T), dtype=np.int8)
        mono = inside.any(axis=1)
        hull = max(3, len(convex_hull_2d(S).vertices))
        thresh = np.full(len(T), 1.0 / (10 * k * hull))
    else:
        has_red = (inside & (colors == int(Color.RED))).any(axis=1)
        has_blue = (inside & (colors == int(Color.BLUE))).any(axis=1)
        mono = has_red ^ has_blue
        col = np.where(has_red, int(Color.RED), int(Color.BLUE)).astype(np.int8)
        if strategy == SAMPLE_TRIPLES:
            hulls = {}
            for c in (Color.RED, Color.BLUE):
                pts = S[colors == int(c)]
                hulls[int(c)] = max(3, len(convex_hull_2d(pts).vertices)) if len(pts) else 3
            thresh = np.array([1.0 / (10 * k * hulls[int(c)]) for c in col])
        else:
            thresh = np.full(len(T), 1.0 / (10 * k))
    est = inside.sum(axis=1) / m
    keep = np.flatnonzero(mono & (est >= thresh))
    order = keep[np.argsort(-est[keep], kind="stable")]
    return T[order], col[order], est[order], inside[order]


def cover_loop(k: int, draw, classify, verify, *, rng, strategy: str = SAMPLE_TRIPLES, c_sample: float,
               max_failures: int = 50, max_tests: int | None = None, budget: int = 20000,
               local_ok=None, batch_ok=None) -> tuple[list, list]:
    """Shared sample / rank / verify loop behind the triangle and terrain covers.

    ``draw(cover, rng)`` returns an uncovered ``(index, point)`` or ``None``;
    ``classify(indices, points)`` returns sample colors (or ``None`` when there
    are no colors); ``verify(triangle, color)`` returns a payload to accept
    the triangle or ``None`` to reject it.  The optional ``local_ok(vertices, rows)``
    gets a candidate and the sample rows inside it and may veto it before
    any oracle query is spent; ``batch_ok(T, S, inside)`` does the same for
    all ranked candidates at once and returns a keep mask.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown candidate strategy {strategy!r}")
    s_target = triangle_sample_size(k, c_sample)
    cover_tris: list[Triangle2] = []
    accepted: list = []
    log: list = []
    failures = 0
    while True:
        seen: dict[int, np.ndarray] = {}
        calls = 0
        done = False
        while len(seen) < s_target and calls < 10 * s_target:
            calls += 1
            got = draw(cover_tris, rng)
            if got is None:
                done = True
                break
            seen.setdefault(int(got[0]), np.asarray(got[1], dtype=np.float64))
        if done and not seen:
            break
        idx = np.array(sorted(seen))
        S = np.array([seen[i] for i in idx])
        colors = classify(idx, S)
        if strategy == SAMPLE_TRIPLES:
            T = sample_triples(S, colors)
        else:
            T = line_triples(S, budget, rng)
        T, col, est, inside = _ranked(T, S, colors, k, strategy)
        tested = vetoed = 0
        verdict = None
        for lo in range(0, len(T), CHUNK):
            sl = slice(lo, lo + CHUNK)
            keep = np.ones(len(T[sl]), dtype=bool) if batch_ok is None else batch_ok(T[sl], S, inside[sl])
            vetoed += int((~keep).sum())
            for t, c, e, rows in zip(T[sl][keep], col[sl][keep], est[sl][keep], inside[sl][keep]):
                if max_tests is not None and tested >= max_tests:
                    break
                if local_ok is not None and not local_ok(t, np.flatnonzero(rows)):
                    vetoed += 1
                    continue
                tested += 1
                tri = Triangle2.from_array(t)
                payload = verify(tri, Color(int(c)) if colors is not None else None)
                if payload is not None:
                    verdict = (tri, payload, float(e))
                    break
            if verdict is not None or (max_tests is not None and tested >= max_tests):
                break
        entry = {"sample": int(len(S)), "sampler_calls": calls, "candidates": int(len(T)), "tested": tested}
        if local_ok is not None:
            entry["vetoed"] = vetoed
        if verdict is None:
            failures += 1
            entry["accepted"] = False
            log.append(entry)
            if failures >= max_failures:
                raise CoverAssumptionViolation(f"{max_failures} consecutive iterations validated no triangle")
            if len(S) < s_target:
                # the sampler is saturated, so S is (nearly) all that is left:
                # cover the stragglers one probe-sized triangle each
                for j, p in enumerate(S):
                    tri = Triangle2.probe(p)
                    payload = verify(tri, Color(int(colors[j])) if colors is not None else None)
                    if payload is not None:
                        cover_tris.append(tri)
                        accepted.append((tri, payload))
                entry["leftovers"] = int(len(S))
                failures = 0
            continue
        failures = 0
        tri, payload, e = verdict
        cover_tris.append(tri)
        accepted.append((tri, payload))
        entry.update(accepted=True, estimate=e, cover_index=len(accepted) - 1)
        log.append(entry)
    return accepted, log


def learn_triangle_cover(k: int, oracle: RegionOracle, rng_seed=None, strategy: str = SAMPLE_TRIPLES, *,
                         c_sample: float = 0.002, max_failures: int = 50, budget: int = 20000) -> TriangleCover:
    """Cover all points by monochromatic triangles using only the region oracles."""
    if k < 1:
        raise ValueError("k must be positive")
    rng = np.random.default_rng(rng_seed)
    known: dict[int, Color] = {}

    def draw(cover, rng_):
        return oracle.sample_uncovered(cover, rng=rng_)

    def classify(idx, S):
        out = np.empty(len(idx), dtype=np.int8)
        for j, (i, p) in enumerate(zip(idx, S)):
            if int(i) not in known:
                v = oracle.triangle(Triangle2.probe(p))
                if not isinstance(v, Monochromatic):
                    raise CoverAssumptionViolation(f"probe around point {int(i)} did not isolate it")
                known[int(i)] = v.color
            out[j] = int(known[int(i)])
        return out

    def verify(tri, color):
        v = oracle.triangle(tri)
        if isinstance(v, Monochromatic) and v.color == color:
            return color
        return None

    accepted, log = cover_loop(k, draw, classify, verify, rng=rng, strategy=strategy, c_sample=c_sample,
                               max_failures=max_failures, budget=budget)
    return TriangleCover(accepted, oracle.ledger.snapshot(), log)
