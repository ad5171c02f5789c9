"""Ball/point lifting one dimension up.

A ball with center ``c`` and radius ``r`` maps to the point
``(2c, r^2 - |c|^2)``; a point ``q`` maps to the hyperplane
``z = -2 q . x' + |q|^2`` written in lifted coordinates ``x' = 2c``.  The lifted
ball lies weakly above the lifted point's plane exactly when ``q`` is in the ball.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .geom import ContractError, Hyperplane, as_point


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float
    # lifted coordinates, when the ball came out of a lifted solve; containment
    # then uses the linear lifted test, which stays exact for huge radii
    lifted: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if self.lifted is not None:
            object.__setattr__(self, "lifted", np.asarray(self.lifted, dtype=np.float64).reshape(-1))
        r = float(self.radius)
        if not r >= 0 or not np.isfinite(r):
            raise ContractError("ball radius must be finite and non-negative")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def contains(self, P, tol: float | None = None) -> np.ndarray:
        """Closed containment, vectorized over rows of ``P``."""
        tol = config.TOL.side if tol is None else tol
        P = np.atleast_2d(np.asarray(P, dtype=np.float64))
        if self.lifted is not None:
            w = self.lifted
            return P @ w[:-1] + w[-1] - (P * P).sum(axis=1) >= -tol
        d2 = ((P - self.center) ** 2).sum(axis=1)
        return d2 <= self.radius ** 2 + tol

    def __repr__(self):
        c = ", ".join(f"{v:.6g}" for v in self.center)
        return f"Ball(({c}), {self.radius:.6g})"


@dataclass(frozen=True, eq=False)
class DegenerateBall:
    """Decoded lifted point with negative squared radius: contains nothing."""

    center: np.ndarray
    radius_sq: float

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, P, tol: float | None = None) -> np.ndarray:
        return np.zeros(len(np.atleast_2d(P)), dtype=bool)


def _check_dim(d: int):
    if d not in (2, 3):
        raise ContractError(f"lifting supports d in {{2, 3}}, got {d}")


def lift_ball(b: Ball) -> np.ndarray:
    _check_dim(b.dim)
    if b.lifted is not None:
        return b.lifted.copy()
    c = b.center
    return np.append(2.0 * c, b.radius ** 2 - float(c @ c))


def lift_point(q) -> Hyperplane:
    """Plane ``q . w_{1..d} + w_{d+1} = |q|^2`` in lifted coordinates.

    Lifted balls containing ``q`` are on the nonnegative side.
    """
    q = as_point(q)
    _check_dim(q.shape[0])
    return Hyperplane(np.append(q, 1.0), float(q @ q))


def lift_points(Q) -> tuple[np.ndarray, np.ndarray]:
    """Unit normals and offsets of the lifted planes of many points at once."""
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    N = np.hstack([Q, np.ones((len(Q), 1))])
    o = (Q * Q).sum(axis=1)
    norm = np.linalg.norm(N, axis=1)
    return N / norm[:, None], o / norm


def unlift(w) -> Ball | DegenerateBall:
    w = as_point(w)
    _check_dim(w.shape[0] - 1)
    c = w[:-1] / 2.0
    r2 = float(w[-1] + c @ c)
    if r2 < 0:
        return DegenerateBall(c, r2)
    return Ball(c, np.sqrt(r2), lifted=w)
