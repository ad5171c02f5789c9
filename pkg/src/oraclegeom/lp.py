"""Small-dimensional linear programming over committed halfspaces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import config, kernels
from .geom import CommittedHalfspace, ContractError, halfspace_rows

MAX_DIM = 4
# stand-in bound when the caller disables the box
_OPEN_BOX = 1e9


class UnsupportedDimension(ContractError):
    pass


@dataclass(frozen=True, eq=False)
class LpInstance:
    dim: int
    constraints: Sequence[CommittedHalfspace] = ()
    objective: np.ndarray | None = None  # direction to minimize; None = feasibility only
    box: float | None = field(default_factory=lambda: config.TOL.box)

    def __post_init__(self):
        if self.dim < 1:
            raise ContractError("LP dimension must be positive")
        if self.dim > MAX_DIM:
            raise UnsupportedDimension(f"lp_solve handles dimension <= {MAX_DIM}, got {self.dim}")
        for h in self.constraints:
            if h.plane.dim != self.dim:
                raise ContractError("constraint dimension does not match the instance")
        if self.box is not None and not self.box > 0:
            raise ContractError("box bound must be positive")
        if self.objective is not None:
            obj = np.asarray(self.objective, dtype=np.float64).reshape(-1)
            if obj.shape[0] != self.dim:
                raise ContractError("objective dimension does not match the instance")
            object.__setattr__(self, "objective", obj)


class LpResult:
    status = ""
    point = None

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True, eq=False)
class Optimal(LpResult):
    point: np.ndarray
    status = "optimal"


@dataclass(frozen=True, eq=False)
class Infeasible(LpResult):
    culprit: int | None = None  # position (in input order) of a constraint exposing infeasibility
    status = "infeasible"


@dataclass(frozen=True, eq=False)
class Unbounded(LpResult):
    status = "unbounded"


def objective_rows(dim: int, objective=None) -> np.ndarray:
    """Lexicographic objective: the given direction (or the canonical
    ``(1, eps, eps^2, ...)``), followed by the unit vectors as tie-breakers."""
    eps = config.TOL.lex
    rows = []
    if objective is None:
        rows.append(eps ** np.arange(dim))
    else:
        rows.append(np.asarray(objective, dtype=np.float64))
    rows.extend(np.eye(dim))
    return np.array(rows)


def solve_rows(A: np.ndarray, b: np.ndarray, R: np.ndarray, M: float, rng=None):
    """Minimize lexicographically over ``A x <= b`` within ``[-M, M]^k``.

    Returns ``(x or None, culprit row or -1)``.  ``rng`` shuffles the insertion order.
    """
    m = len(b)
    if rng is not None and m > 1:
        perm = rng.permutation(m)
    else:
        perm = np.arange(m)
    st, x, cul = kernels.seidel_lp(A[perm].reshape(m, R.shape[1]), b[perm], R, M, config.TOL.side)
    if st:
        return None, int(perm[cul]) if cul >= 0 else -1
    return x, -1


def lp_solve(inst: LpInstance, rng_seed=None) -> LpResult:
    d = inst.dim
    A, b = halfspace_rows(list(inst.constraints), d)
    M = _OPEN_BOX if inst.box is None else inst.box
    R = objective_rows(d, inst.objective)
    rng = np.random.default_rng(rng_seed)
    # kernel form is A x <= b
    x, cul = solve_rows(-A, -b, R, M, rng)
    if x is None:
        return Infeasible(cul if cul >= 0 else None)
    if inst.box is None and inst.objective is not None:
        # a bounded optimum does not move when the stand-in box grows
        c = inst.objective
        x2, _ = solve_rows(-A, -b, R, 2.0 * M)
        if x2 is not None and float(c @ x2) < float(c @ x) - 1e-6 * M * float(np.abs(c).max()):
            return Unbounded()
    return Optimal(x)


def max_slack_point(constraints: Sequence[CommittedHalfspace], dim: int, box: float | None = None,
                    cap: float = 1.0, include_box: bool = True, rng_seed=None):
    """Point maximizing the minimum slack over the constraints (Chebyshev-style).

    Returns ``(x, slack)``; ``slack <= 0`` means no point with positive margin
    exists and ``x`` is None when even the closed region is empty.  Needs
    ``dim <= 3`` (one extra variable carries the slack).
    """
    if dim + 1 > MAX_DIM:
        raise UnsupportedDimension("max_slack_point handles dimension <= 3")
    M = config.TOL.box if box is None else box
    A, b = halfspace_rows(list(constraints), dim)
    if include_box:
        A = np.vstack([A, np.eye(dim), -np.eye(dim)])
        b = np.concatenate([b, -M * np.ones(dim), -M * np.ones(dim)])
    # a.x - b >= t  <=>  -a.x + t <= -b ; plus t <= cap
    K = np.hstack([-A, np.ones((len(A), 1))])
    rhs = -b
    cap_row = np.zeros((1, dim + 1))
    cap_row[0, -1] = 1.0
    K = np.vstack([K, cap_row])
    rhs = np.append(rhs, cap)
    R = np.zeros((dim + 2, dim + 1))
    R[0, -1] = -1.0
    R[1:, :] = np.eye(dim + 1)
    # the slack variable needs room below zero to report empty regions
    Mbox = max(M, 2.0 * cap) * 2.0 + 1.0
    rng = np.random.default_rng(rng_seed)
    x, _ = solve_rows(K, rhs, R, Mbox, rng)
    if x is None:
        return None, -np.inf
    return x[:dim], float(x[-1])
