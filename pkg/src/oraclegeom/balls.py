"""Learning hidden colors with balls: one separating ball, or a cover by k monochromatic balls.

Both learners work in the lifted space, where a disk is a point ``w`` and a
sample point ``q`` is a plane; ``g_q(w) = r^2 - |c - q|^2`` is non-negative
exactly when ``q`` lies in the disk decoded from ``w``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from . import config, kernels
from .geom import CommittedHalfspace, Hyperplane, relative_sample_size
from .lift import Ball, DegenerateBall, lift_ball, lift_points, unlift
from .lp import LpInstance, lp_solve, max_slack_point
from .oracles import Color, OracleKind, ProximityOracle
from .ulp.centerpoint import NUDGE, solve_ulp_centerpoint
from .ulp.result import SolverDiagnostic


class AssumptionViolation(RuntimeError):
    """The instance does not satisfy the learner's structural assumption."""


class LiftedPlanes:
    """Lifted planes of a fixed planar point set, with both normalized and raw forms."""

    def __init__(self, points):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        self.normals, self.offsets = lift_points(self.points)
        self._hp: dict[int, Hyperplane] = {}

    def __len__(self):
        return len(self.points)

    def gap(self, i, w) -> float:
        """``r^2 - |c - q_i|^2`` for the disk lifted to ``w``; evaluated in
        lifted form, which stays accurate for huge disks."""
        return float(_gaps(self.points[[i]], w)[0])

    def halfspace(self, i: int, side: int) -> CommittedHalfspace:
        hp = self._hp.get(i)
        if hp is None:
            q = self.points[i]
            hp = self._hp[i] = Hyperplane(np.append(q, 1.0), float(q @ q))
        return CommittedHalfspace(hp, side, int(i))


def _gaps(P, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    return P @ w[:2] + w[2] - (P * P).sum(axis=1)


def _decode(w):
    c = np.asarray(w[:2], dtype=np.float64) / 2.0
    return c, float(w[2] + c @ c)


# ---------------------------------------------------------------- single ball


class _SingleBallSeparation:
    """Lifted separation oracle built from blue NN and red FN queries."""

    def __init__(self, prox: ProximityOracle, lifted: LiftedPlanes):
        self.prox = prox
        self.lifted = lifted
        self.ledger = prox.ledger

    def separation(self, w):
        tol = config.TOL.side
        c, r2 = _decode(w)
        if r2 < 0:
            far = self.prox.fn(c, Color.RED)
            if far is None:
                return None
            return self.lifted.halfspace(far.index, 1)
        near = self.prox.nn(c, Color.BLUE)
        if near is not None and self.lifted.gap(near.index, w) >= -tol:
            return self.lifted.halfspace(near.index, -1)
        far = self.prox.fn(c, Color.RED)
        if far is not None and self.lifted.gap(far.index, w) < -tol:
            return self.lifted.halfspace(far.index, 1)
        return None


def _labels_for(points, w, color_in: Color) -> np.ndarray:
    inside = _gaps(points, w) >= -config.TOL.side
    return np.where(inside, int(color_in), int(color_in.other)).astype(np.int8)


def learn_single_ball(points, prox: ProximityOracle, dim: int = 2, rng_seed=None, **solver_kw):
    """Ball containing exactly the red points, and the induced labels.

    Raises :class:`AssumptionViolation` when no such ball exists.
    """
    if dim != 2:
        raise ValueError("learn_single_ball is implemented for planar points")
    lifted = LiftedPlanes(points)
    sep = _SingleBallSeparation(prox, lifted)
    res = solve_ulp_centerpoint((lifted.normals, lifted.offsets), sep, 3, kind="cells",
                                rng_seed=rng_seed, **solver_kw)
    if not res.feasible:
        raise AssumptionViolation("no ball separates the red points from the blue points")
    labels = _labels_for(lifted.points, res.witness, Color.RED)
    ball = unlift(res.witness)
    return ball, labels


# ---------------------------------------------------------------- canonical sets


@dataclass(frozen=True, eq=False)
class CanonicalDiskSet:
    disk: Ball
    subset: tuple  # sorted sample indices inside the disk
    mono: Color | None = None


def _candidate_lifts(L: LiftedPlanes) -> np.ndarray:
    """Lifted points inside every cell of the arrangement that touches a vertex
    or a pairwise intersection line of the lifted planes."""
    N = np.hstack([L.points, np.ones((len(L), 1))])  # unnormalized: g = N.w - o
    o = (L.points ** 2).sum(axis=1)
    m = len(L)
    out = []
    if m >= 3:
        combos = np.array(list(combinations(range(m), 3)))
        mats = N[combos]
        det = np.linalg.det(mats)
        ok = np.abs(det) > 1e-12
        combos, mats = combos[ok], mats[ok]
        if len(combos):
            inv = np.linalg.inv(mats)
            v = np.einsum("mij,mj->mi", inv, o[combos])
            scale = np.linalg.norm(mats, axis=2)  # per-plane norms, so nudges are in distance units
            for s in product((-1.0, 1.0), repeat=3):
                out.append(v + NUDGE * np.einsum("mij,mj->mi", inv, scale * np.array(s)))
            out.extend(_degenerate_vertex_lifts(N, o, v))
    if m >= 2:
        # cells around pairwise lines (needed for collinear samples)
        pairs = np.array(list(combinations(range(m), 2)))
        A = N[pairs]  # (p, 2, 3)
        u = np.cross(A[:, 0], A[:, 1])
        keep = np.linalg.norm(u, axis=1) > 1e-12
        A, pairs = A[keep], pairs[keep]
        if len(A):
            pinv = np.linalg.pinv(A)  # (p, 3, 2)
            base = np.einsum("pij,pj->pi", pinv, o[pairs])
            nrm = np.linalg.norm(A, axis=2)
            for s in product((-1.0, 1.0), repeat=2):
                out.append(base + NUDGE * np.einsum("pij,pj->pi", pinv, nrm * np.array(s)))
    for i in range(m):
        # a tiny disk around each point
        q = L.points[i]
        out.append(lift_ball(Ball(q, 1e-6 * max(1.0, float(np.abs(q).max()))))[None])
    return np.vstack(out) if out else np.zeros((0, 3))


def _degenerate_vertex_lifts(N, o, V, tol=1e-9):
    """Extra cell points around vertices where four or more lifted planes meet (cocircular samples)."""
    if len(V) == 0:
        return []
    G = V @ N.T - o  # (vertices, planes)
    nrm = np.linalg.norm(N, axis=1)
    on = np.abs(G) <= tol * nrm * np.maximum(1.0, np.abs(V).max(axis=1))[:, None]
    deg = np.flatnonzero(on.sum(axis=1) > 3)
    out = []
    seen = set()
    for vi in deg:
        K = np.flatnonzero(on[vi])
        key = tuple(K)
        if key in seen:
            continue
        seen.add(key)
        v = V[vi]
        for a, b in combinations(K, 2):
            A = N[[a, b]]
            u = np.cross(A[0], A[1])
            un = np.linalg.norm(u)
            if un <= 1e-12:
                continue
            u /= un
            pinv = np.linalg.pinv(A)
            for sign in (-1.0, 1.0):
                for s in product((-1.0, 1.0), repeat=2):
                    d = sign * u + 1e-3 * pinv @ (nrm[[a, b]] * np.array(s))
                    out.append((v + NUDGE * d)[None])
    return out


def _unique_rows(masks: np.ndarray) -> np.ndarray:
    """Sorted indices of the first occurrence of each distinct row."""
    if len(masks) == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.lexsort(masks.T[::-1])
    srt = masks[order]
    new = np.ones(len(srt), dtype=bool)
    new[1:] = np.any(srt[1:] != srt[:-1], axis=1)
    # first occurrence within each run of equal rows (lexsort is stable)
    return np.sort(order[new])


def canonical_arrays(sample):
    """Array form of :func:`canonical_disk_sets` without the empty set:
    ``(bits (sets, m) bool, centers, squared radii)``."""
    S = np.asarray(sample, dtype=np.float64).reshape(-1, 2)
    m = len(S)
    if m == 0:
        return np.zeros((0, 0), dtype=bool), np.zeros((0, 2)), np.zeros(0)
    W = _candidate_lifts(LiftedPlanes(S))
    C = W[:, :2] / 2.0
    R2 = W[:, 2] + (C * C).sum(axis=1)
    real = R2 >= 0
    C, R2 = C[real], R2[real]
    masks = kernels.disk_masks(S, C, R2, config.TOL.side)
    first = _unique_rows(masks)
    bits = np.unpackbits(masks[first].view(np.uint8), axis=1, bitorder="little")[:, :m].astype(bool)
    nonempty = bits.any(axis=1)
    return bits[nonempty], C[first][nonempty], R2[first][nonempty]


def canonical_disk_sets(sample) -> list[CanonicalDiskSet]:
    """All distinct subsets of the sample cut out by closed disks, each with a realizing disk."""
    S = np.asarray(sample, dtype=np.float64).reshape(-1, 2)
    if len(S) == 0:
        return [CanonicalDiskSet(Ball(np.zeros(2), 0.0), ())]
    bits, C, R2 = canonical_arrays(S)
    far = S.min(axis=0) - 1.0 - np.ptp(S, axis=0)
    out = [CanonicalDiskSet(Ball(far, 0.0), ())]
    for row, c, r2 in zip(bits, C, R2):
        out.append(CanonicalDiskSet(Ball(c, math.sqrt(r2)), tuple(np.flatnonzero(row).tolist())))
    return out


# ---------------------------------------------------------------- mono ball search


class _MonoSeparation:
    """Separation for the implicit problem "a ball holding the required points and no opposite-colored point"."""

    def __init__(self, prox: ProximityOracle, lifted: LiftedPlanes, required, color: Color):
        self.prox = prox
        self.lifted = lifted
        self.required = np.asarray(required, dtype=np.int64)
        self.color = Color(color)
        self.ledger = prox.ledger

    def separation(self, w):
        tol = config.TOL.side
        c, r2 = _decode(w)
        if r2 < 0:
            return self.lifted.halfspace(int(self.required[0]), 1)
        bad = np.flatnonzero(_gaps(self.lifted.points[self.required], w) < -tol)
        if len(bad):
            return self.lifted.halfspace(int(self.required[bad[0]]), 1)
        near = self.prox.nn(c, self.color.other)
        if near is not None and self.lifted.gap(near.index, w) >= -tol:
            return self.lifted.halfspace(near.index, -1)
        return None


@dataclass
class MonoSearchResult:
    ball: Ball | None
    queries: int
    iterations: int = 0
    blocking: tuple = ()  # required points that no ball avoiding the found opposite points can hold

    @property
    def found(self) -> bool:
        return self.ball is not None


def mono_ball_search(required, all_points, prox: ProximityOracle, color, strategy: str = "implicit-centerpoint",
                     *, warm_start: Ball | None = None, rng_seed=None, lifted: LiftedPlanes | None = None,
                     max_iterations: int | None = None, margin: float = 1e-7) -> MonoSearchResult:
    """Search a ball containing the ``required`` points (indices into ``all_points``)
    and no point of the other color.  ``ball is None`` means no such ball exists."""
    required = np.asarray(required, dtype=np.int64).reshape(-1)
    if len(required) == 0:
        raise ValueError("mono_ball_search needs at least one required point")
    lifted = lifted or LiftedPlanes(all_points)
    sep = _MonoSeparation(prox, lifted, required, Color(color))
    before = prox.ledger.total()
    pre = [lifted.halfspace(int(i), 1) for i in required]
    if strategy == "implicit-centerpoint":
        warm = [lift_ball(warm_start)] if warm_start is not None else []
        res = solve_ulp_centerpoint((lifted.normals, lifted.offsets), sep, 3, kind="cells", rng_seed=rng_seed,
                                    committed=pre, initial_queries=warm)
        if res.feasible:
            return MonoSearchResult(unlift(res.witness), prox.ledger.total() - before, res.queries)
        return MonoSearchResult(None, prox.ledger.total() - before, res.queries, _required_core(res.committed))
    if strategy == "counterexample-loop":
        cap = max_iterations if max_iterations is not None else 4 * len(lifted)
        committed = list(pre)
        for it in range(1, cap + 1):
            w = _loop_point(committed, margin)
            if w is None:
                return MonoSearchResult(None, prox.ledger.total() - before, it, _required_core(committed))
            h = sep.separation(w)
            if h is None:
                return MonoSearchResult(unlift(w), prox.ledger.total() - before, it)
            committed.append(h)
        raise SolverDiagnostic(f"counterexample loop exceeded {cap} iterations")
    raise ValueError(f"unknown mono-ball strategy {strategy!r}")


def _required_core(committed) -> tuple:
    """Deletion filter over the include constraints: a minimal set of required
    points that, with all committed exclusions, admits no strictly separating ball."""
    tol = config.TOL.side
    excl = [h for h in committed if h.side < 0]
    incl = [h for h in committed if h.side > 0]

    def blocked(inc):
        _, slack = max_slack_point(excl + inc, 3)
        return slack <= tol

    if not blocked(incl):
        return tuple(sorted(h.index for h in incl))
    i = 0
    while i < len(incl):
        trial = incl[:i] + incl[i + 1:]
        if blocked(trial):
            incl = trial
        else:
            i += 1
    return tuple(sorted(h.index for h in incl))


def _loop_point(committed, margin):
    """An LP vertex of the committed lifted constraints, each tightened by ``margin``."""
    rows = [CommittedHalfspace(Hyperplane(h.plane.normal, h.plane.offset + h.side * margin), h.side, h.index)
            for h in committed]
    res = lp_solve(LpInstance(3, rows), 0)
    return res.point if res.feasible else None


# ---------------------------------------------------------------- k-ball cover


@dataclass
class LabeledCover:
    balls: list  # (Ball, Color)
    labels: np.ndarray
    ledger: dict
    log: list = field(default_factory=list)


def learn_k_ball_cover(points, k: int, prox: ProximityOracle, rng_seed=None, *, c_ra: float = 0.015,
                       strategy: str = "implicit-centerpoint", max_failures: int = 50,
                       max_searches: int = 12, max_successes: int = 2) -> LabeledCover:
    """Label every point by covering the set with monochromatic balls.

    Each iteration samples the unlabeled points, learns the sample's colors
    with zero-distance NN probes, and searches balls around the heaviest
    monochromatic canonical sample subsets; the success covering most
    unlabeled points is kept.
    """
    if k < 1:
        raise ValueError("k must be positive")
    P = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(P)
    rng = np.random.default_rng(rng_seed)
    lifted = LiftedPlanes(P)
    labels = np.full(n, -1, dtype=np.int8)
    known = np.full(n, -1, dtype=np.int8)  # colors learned from probes
    balls: list = []
    log: list = []
    failures = 0
    blocked: list[frozenset] = []  # required-point sets proven not to fit in one monochromatic ball
    size_full = relative_sample_size(0.25, 1.0 / (4 * k), 0.05, 3, c_ra)
    while True:
        rem = np.flatnonzero(labels < 0)
        if len(rem) == 0:
            break
        size = min(size_full, len(rem))
        S = rng.choice(rem, size=size, replace=False) if size < len(rem) else rem
        for i in S:
            if known[i] < 0:
                hit = prox.nn(P[i], Color.RED)
                known[i] = int(Color.RED) if hit is not None and hit.distance == 0.0 else int(Color.BLUE)
        colors = known[S]
        heavy = _heavy_mono_sets(P[S], colors, 1.0 / (2 * k))
        best = None
        tried = succeeded = 0
        for f, col in heavy:
            if tried >= max_searches or succeeded >= max_successes:
                break
            req = S[list(f.subset)]
            members = set(req.tolist())
            if any(core <= members for core in blocked):
                continue
            tried += 1
            res = mono_ball_search(req, P, prox, col, strategy, warm_start=f.disk,
                                   rng_seed=int(rng.integers(2**31)), lifted=lifted)
            if not res.found:
                if res.blocking:
                    blocked.append(frozenset(res.blocking))
                continue
            succeeded += 1
            cov = rem[res.ball.contains(P[rem])]
            if best is None or len(cov) > len(best[2]):
                best = (res.ball, col, cov)
        entry = {"remaining": int(len(rem)), "sample": int(size), "searched": tried}
        if best is None:
            failures += 1
            entry["accepted"] = False
            log.append(entry)
            if failures >= max_failures:
                raise AssumptionViolation(f"{max_failures} consecutive iterations found no monochromatic ball")
            continue
        failures = 0
        ball, col, cov = best
        labels[cov] = int(col)
        balls.append((ball, col))
        entry.update(accepted=True, covered=int(len(cov)), fraction=float(len(cov) / len(rem)))
        log.append(entry)
    return LabeledCover(balls, labels, prox.ledger.snapshot(), log)


def _heavy_mono_sets(sample, colors, frac):
    """Monochromatic canonical sets holding at least ``frac`` of the sample, largest first."""
    bits, C, R2 = canonical_arrays(sample)
    if len(bits) == 0:
        return
    red = bits & (colors == int(Color.RED))[None, :]
    blue = bits & (colors == int(Color.BLUE))[None, :]
    size = bits.sum(axis=1)
    mono = ~(red.any(axis=1) & blue.any(axis=1)) & (size >= frac * len(sample))
    idx = np.flatnonzero(mono)
    idx = idx[np.argsort(-size[idx], kind="stable")]
    for i in idx:
        col = Color.RED if red[i].any() else Color.BLUE
        yield CanonicalDiskSet(Ball(C[i], math.sqrt(R2[i])), tuple(np.flatnonzero(bits[i]).tolist()), col), col
