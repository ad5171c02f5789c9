"""Reference oracles over hidden ground truth, with query accounting.

Solvers receive oracle objects only.  The ground-truth classes keep their
hidden arrays private; the public accessors raise :class:`HiddenDataError`
outside a :func:`reveal` block, which the white-box harness uses.
"""
from __future__ import annotations

import contextlib
import enum
import json
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import config
from .geom import CommittedHalfspace, ContractError, Hyperplane, Triangle2, as_point, plane_arrays, triangles_contain
from .lp import solve_rows


class OracleKind(str, enum.Enum):
    SEPARATION = "Separation"
    LABELING = "Labeling"
    NN = "NN"
    FN = "FN"
    TRIANGLE = "Triangle"
    SAMPLE_UNCOVERED = "SampleUncovered"
    VALIDATE_TRIANGLE = "ValidateTriangle"


class Color(enum.IntEnum):
    RED = 0
    BLUE = 1

    @property
    def other(self) -> "Color":
        return Color(1 - self.value)

    def __str__(self):
        return self.name.lower()

    @classmethod
    def parse(cls, v) -> "Color":
        if isinstance(v, str):
            return cls[v.upper()]
        return cls(int(v))


class QueryLedger:
    """Monotone per-kind query counters, safe to bump from several threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._counts = {k: 0 for k in OracleKind}

    def bump(self, kind: OracleKind, amount: int = 1):
        if amount < 0:
            raise ContractError("ledger counters never decrease")
        with self._lock:
            self._counts[OracleKind(kind)] += amount

    def __getitem__(self, kind) -> int:
        return self._counts[OracleKind(kind)]

    def total(self, *kinds) -> int:
        kinds = kinds or tuple(OracleKind)
        return sum(self._counts[OracleKind(k)] for k in kinds)

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return {k.value: v for k, v in self._counts.items()}

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True)

    def __repr__(self):
        nz = {k: v for k, v in self.snapshot().items() if v}
        return f"QueryLedger({nz})"


class HiddenDataError(RuntimeError):
    """Raised when hidden ground-truth data is read outside :func:`reveal`."""


_reveal_state = threading.local()


@contextlib.contextmanager
def reveal():
    """Grant read access to hidden ground-truth fields (white-box checks only)."""
    depth = getattr(_reveal_state, "depth", 0)
    _reveal_state.depth = depth + 1
    try:
        yield
    finally:
        _reveal_state.depth = depth


def _guard(name: str):
    if not getattr(_reveal_state, "depth", 0):
        raise HiddenDataError(f"hidden field '{name}' read outside reveal()")


class UlpGroundTruth:
    def __init__(self, constraints: Sequence[Hyperplane], sides, implicit_mask=None, dim: int | None = None):
        self.constraints = list(constraints)
        sides = np.asarray(sides, dtype=np.int64).reshape(-1)
        if len(sides) != len(self.constraints):
            raise ContractError("one hidden side per constraint is required")
        if not np.all(np.isin(sides, (-1, 1))):
            raise ContractError("hidden sides must be +1 or -1")
        if implicit_mask is not None:
            implicit_mask = np.asarray(implicit_mask, dtype=bool).reshape(-1)
            if len(implicit_mask) != len(sides):
                raise ContractError("implicit mask length must match the constraints")
        dims = {h.dim for h in self.constraints}
        if len(dims) > 1:
            raise ContractError("all constraints must share one dimension")
        self.dim = dims.pop() if dims else (dim or 0)
        if dim is not None and self.dim != dim:
            raise ContractError("constraint dimension does not match dim")
        self.normals, self.offsets = plane_arrays(self.constraints)
        if not self.constraints:
            self.normals = np.zeros((0, self.dim))
        self._sides = sides
        self._mask = implicit_mask

    def __len__(self):
        return len(self.constraints)

    @property
    def sides(self) -> np.ndarray:
        _guard("sides")
        return self._sides

    @property
    def implicit_mask(self):
        _guard("implicit_mask")
        return self._mask


class ColoredGroundTruth:
    def __init__(self, points, colors=None, heights=None):
        P = np.asarray(points, dtype=np.float64)
        if P.ndim != 2 or not np.all(np.isfinite(P)):
            raise ContractError("points must be a finite (n, d) array")
        self.points = P
        n = len(P)
        if colors is None:
            colors = np.zeros(n, dtype=np.int8)
        colors = np.array([Color.parse(c) for c in colors], dtype=np.int8) if len(colors) else np.zeros(0, np.int8)
        if len(colors) != n:
            raise ContractError("one hidden color per point is required")
        if heights is not None:
            heights = np.asarray(heights, dtype=np.float64).reshape(-1)
            if len(heights) != n:
                raise ContractError("one hidden height per point is required")
        self._colors = colors
        self._heights = heights

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def colors(self) -> np.ndarray:
        _guard("colors")
        return self._colors

    @property
    def heights(self):
        _guard("heights")
        return self._heights


# ---------------------------------------------------------------- undecided LP


class UlpOracle:
    """Separation and labeling oracles for an undecided LP.

    Separation always scans the full original constraint set (restricted by
    the implicit mask when present), whatever subproblem the caller is in.
    """

    def __init__(self, gt: UlpGroundTruth, ledger: QueryLedger | None = None):
        self._gt = gt
        self.ledger = ledger or QueryLedger()
        self.planes = gt.constraints
        self.dim = gt.dim
        self.n = len(gt)
        self._signed_normals = gt.normals * gt._sides[:, None] if self.n else gt.normals
        self._signed_offsets = gt.offsets * gt._sides if self.n else gt.offsets

    def separation(self, p) -> CommittedHalfspace | None:
        """``None`` when ``p`` is feasible, else the lowest-index violated constraint."""
        self.ledger.bump(OracleKind.SEPARATION)
        p = as_point(p, self.dim)
        if self.n == 0:
            return None
        vals = self._signed_normals @ p - self._signed_offsets
        bad = vals < -config.TOL.side
        if self._gt._mask is not None:
            bad &= self._gt._mask
        hit = np.flatnonzero(bad)
        if len(hit) == 0:
            return None
        i = int(hit[0])
        return CommittedHalfspace(self.planes[i], int(self._gt._sides[i]), i)

    def label(self, index: int) -> CommittedHalfspace:
        if not 0 <= index < self.n:
            raise IndexError(f"constraint index {index} out of range")
        self.ledger.bump(OracleKind.LABELING)
        return CommittedHalfspace(self.planes[index], int(self._gt._sides[index]), int(index))


# ---------------------------------------------------------------- proximity


@dataclass(frozen=True, eq=False)
class Neighbor:
    index: int
    point: np.ndarray
    distance: float


class ProximityOracle:
    """Nearest/furthest point of a given hidden color."""

    def __init__(self, gt: ColoredGroundTruth, ledger: QueryLedger | None = None):
        self._gt = gt
        self.ledger = ledger or QueryLedger()
        self.points = gt.points
        self.dim = gt.dim
        self._by_color = {c: np.flatnonzero(gt._colors == c) for c in Color}

    def _query(self, q, color, kind, pick):
        self.ledger.bump(kind)
        q = as_point(q, self.dim)
        idx = self._by_color[Color.parse(color)]
        if len(idx) == 0:
            return None
        d2 = ((self.points[idx] - q) ** 2).sum(axis=1)
        j = int(pick(d2))  # argmin/argmax return the lowest index on ties
        i = int(idx[j])
        return Neighbor(i, self.points[i], float(np.sqrt(d2[j])))

    def nn(self, q, color) -> Neighbor | None:
        """``None`` when no point has that color."""
        return self._query(q, color, OracleKind.NN, np.argmin)

    def fn(self, q, color) -> Neighbor | None:
        return self._query(q, color, OracleKind.FN, np.argmax)


# ---------------------------------------------------------------- regions


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Monochromatic:
    color: Color


@dataclass(frozen=True, eq=False)
class Mixed:
    red: np.ndarray
    blue: np.ndarray
    red_index: int = -1
    blue_index: int = -1


class _UncoveredSampler:
    """Uniform sampling among points outside a growing list of triangles."""

    def __init__(self, points: np.ndarray):
        self._points = points
        self._cover_ids: list[int] = []
        self._covered = np.zeros(len(points), dtype=bool)

    def _sync(self, cover: Sequence[Triangle2]):
        ids = [id(t) for t in cover]
        k = len(self._cover_ids)
        if ids[:k] != self._cover_ids:
            self._cover_ids, k = [], 0
            self._covered[:] = False
        fresh = list(cover)[k:]
        if fresh:
            T = np.array([t.vertices for t in fresh])
            self._covered |= triangles_contain(T, self._points).any(axis=0)
            self._cover_ids = ids
            self._keep = list(cover)  # keep ids alive

    def sample(self, cover, rng) -> int | None:
        self._sync(cover)
        free = np.flatnonzero(~self._covered)
        if len(free) == 0:
            return None
        return int(free[rng.integers(len(free))])


class RegionOracle:
    """Triangle (color) oracle and uncovered-point sampler for planar points."""

    def __init__(self, gt: ColoredGroundTruth, ledger: QueryLedger | None = None):
        if gt.dim != 2:
            raise ContractError("region oracles work on planar points")
        self._gt = gt
        self.ledger = ledger or QueryLedger()
        self.n = len(gt)
        self._sampler = _UncoveredSampler(gt.points)

    def triangle(self, t: Triangle2):
        self.ledger.bump(OracleKind.TRIANGLE)
        inside = np.flatnonzero(t.contains(self._gt.points))
        if len(inside) == 0:
            return Empty()
        cols = self._gt._colors[inside]
        reds = inside[cols == Color.RED]
        blues = inside[cols == Color.BLUE]
        if len(reds) and len(blues):
            r, b = int(reds[0]), int(blues[0])
            return Mixed(self._gt.points[r], self._gt.points[b], r, b)
        return Monochromatic(Color.RED if len(reds) else Color.BLUE)

    def sample_uncovered(self, cover: Sequence[Triangle2], rng_seed=None, *, rng=None):
        """A uniformly random uncovered point as ``(index, point)``; ``None`` when all are covered."""
        self.ledger.bump(OracleKind.SAMPLE_UNCOVERED)
        if rng is None:
            rng = np.random.default_rng(rng_seed)
        i = self._sampler.sample(cover, rng)
        if i is None:
            return None
        return i, self._gt.points[i]


# ---------------------------------------------------------------- terrain


@dataclass(frozen=True, eq=False)
class Valid:
    plane: np.ndarray  # (a, b, c) of z = a x + b y + c
    max_error: float = 0.0


@dataclass(frozen=True, eq=False)
class Invalid:
    witness: np.ndarray  # (x, y, z)
    witness_index: int = -1


SLOPE_LIMIT = 1e3


def fit_plane_within(xy: np.ndarray, z: np.ndarray, eps: float, rng=None, slope_limit: float = SLOPE_LIMIT):
    """Minimax plane fit with ``|a|, |b| <= slope_limit``.  Returns ``(plane, max_error, culprit)``: ``culprit``
    is -1 when every point is within ``eps`` (up to tolerance), else the
    local index of a point whose constraint exposed infeasibility."""
    tol = config.TOL.side
    m = len(z)
    if m == 0:
        return np.zeros(3), 0.0, -1
    X = np.hstack([xy, np.ones((m, 1))])
    # minimize the maximum vertical error e:  X v - z <= e,  z - X v <= e
    A = np.vstack([np.hstack([X, -np.ones((m, 1))]), np.hstack([-X, -np.ones((m, 1))])])
    b = np.concatenate([z, -z])
    S = np.zeros((4, 4))
    S[[0, 1, 2, 3], [0, 0, 1, 1]] = [1.0, -1.0, 1.0, -1.0]
    A = np.vstack([A, S])
    b = np.concatenate([b, np.full(4, slope_limit)])
    R = np.zeros((5, 4))
    R[0, 3] = 1.0
    R[1:, :] = np.eye(4)
    M = max(config.TOL.box, 4.0 * float(np.abs(z).max(initial=0.0)) + 1.0)
    v, _ = solve_rows(A, b, R, M, rng)
    if v is None:
        raise RuntimeError("minimax plane fit failed on an always-feasible program")
    plane = v[:3]
    err = float(np.abs(X @ plane - z).max())
    if err <= eps + tol:
        return plane, err, -1
    # locate a point in an infeasibility core of the eps-band program
    A2 = np.vstack([X, -X, S[:, :3]])
    b2 = np.concatenate([z + eps, -(z - eps), np.full(4, slope_limit)])
    x, cul = solve_rows(A2, b2, np.vstack([[1.0, 0, 0], np.eye(3)]), M, rng)
    if x is None and 0 <= cul < 2 * m:
        return plane, err, int(cul % m)
    # only tolerance-level infeasibility: blame the worst-fit point
    return plane, err, int(np.argmax(np.abs(X @ plane - z)))


class TerrainOracle:
    """Height-validating triangle oracle plus the uncovered-point sampler."""

    def __init__(self, gt: ColoredGroundTruth, ledger: QueryLedger | None = None):
        if gt._heights is None:
            raise ContractError("terrain oracles need hidden heights")
        if gt.dim != 2:
            raise ContractError("terrain points are given by planar projections")
        self._gt = gt
        self.ledger = ledger or QueryLedger()
        self.n = len(gt)
        self._sampler = _UncoveredSampler(gt.points)

    def validate_triangle(self, t: Triangle2, eps: float, rng_seed=0):
        if eps < 0:
            raise ContractError("eps must be non-negative")
        self.ledger.bump(OracleKind.VALIDATE_TRIANGLE)
        inside = np.flatnonzero(t.contains(self._gt.points))
        xy = self._gt.points[inside]
        z = self._gt._heights[inside]
        plane, err, cul = fit_plane_within(xy, z, eps, np.random.default_rng(rng_seed))
        if cul < 0:
            return Valid(plane, err)
        i = int(inside[cul])
        return Invalid(np.append(self._gt.points[i], self._gt._heights[i]), i)

    def sample_uncovered(self, cover: Sequence[Triangle2], rng_seed=None, *, rng=None):
        self.ledger.bump(OracleKind.SAMPLE_UNCOVERED)
        if rng is None:
            rng = np.random.default_rng(rng_seed)
        i = self._sampler.sample(cover, rng)
        if i is None:
            return None
        return i, self._gt.points[i]
