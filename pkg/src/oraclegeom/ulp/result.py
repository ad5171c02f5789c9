"""Result type and query bookkeeping shared by the undecided-LP solvers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .. import config
from ..geom import CommittedHalfspace, box_halfspaces
from ..lp import LpInstance, lp_solve


class SeparationOracle(Protocol):
    ledger: object

    def separation(self, p) -> CommittedHalfspace | None: ...


class CapacityError(RuntimeError):
    """Raised when an explicit enumeration would exceed its vertex cap."""


class SolverDiagnostic(RuntimeError):
    """Internal consistency failure (typically a tolerance breakdown)."""


@dataclass
class UlpResult:
    feasible: bool
    witness: np.ndarray | None
    committed: list[CommittedHalfspace]
    ledger: dict = field(default_factory=dict)
    core: list[CommittedHalfspace] | None = None  # LP-infeasible committed subset
    queries: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def outcome(self) -> str:
        return "feasible" if self.feasible else "infeasible"

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "committed": [
                {"index": h.index, "normal": h.plane.normal.tolist(), "offset": h.plane.offset, "side": h.side}
                for h in self.committed
            ],
            "queries": self.queries,
            "ledger": self.ledger,
            "stats": self.stats,
        }


class QuerySession:
    """Wraps a separation oracle, recording committed halfspaces (deduplicated by index)."""

    def __init__(self, oracle: SeparationOracle, dim: int, committed=None):
        self.oracle = oracle
        self.dim = dim
        self.committed: list[CommittedHalfspace] = []
        self._seen: set = set()
        self.queries = 0
        self.labels = 0
        for h in committed or ():
            self.commit(h)

    def commit(self, h: CommittedHalfspace) -> bool:
        key = h.index if h.index is not None else (tuple(np.round(h.plane.normal, 12)), round(h.plane.offset, 12), h.side)
        if key in self._seen:
            return False
        self._seen.add(key)
        self.committed.append(h)
        return True

    def query(self, p) -> CommittedHalfspace | None:
        self.queries += 1
        h = self.oracle.separation(np.asarray(p, dtype=np.float64))
        if h is not None:
            self.commit(h)
        return h

    def ledger(self) -> dict:
        led = getattr(self.oracle, "ledger", None)
        return led.snapshot() if hasattr(led, "snapshot") else {}

    def feasible(self, witness, **stats) -> UlpResult:
        return UlpResult(True, np.asarray(witness, dtype=np.float64), list(self.committed), self.ledger(),
                         None, self.queries, stats)

    def infeasible(self, **stats) -> UlpResult:
        return UlpResult(False, None, list(self.committed), self.ledger(), list(self.committed), self.queries, stats)


def committed_lp_feasible(committed, dim: int, seed=0) -> bool:
    """LP check of the committed halfspaces inside the default box."""
    return lp_solve(LpInstance(dim, list(committed)), seed).feasible


def certify_infeasible(session: QuerySession, max_rounds: int = 64) -> UlpResult | None:
    """Confirm that the committed set is LP-infeasible.

    While it is not, query the point of maximum slack; a feasible answer
    yields a witness.  Returns ``None`` when the rounds run out.
    """
    from ..lp import max_slack_point

    for _ in range(max_rounds):
        if not committed_lp_feasible(session.committed, session.dim):
            return session.infeasible()
        if session.dim > 3:
            return None
        x, _ = max_slack_point(session.committed, session.dim)
        if x is None:
            return session.infeasible()
        if session.query(x) is None:
            return session.feasible(x, certified_by="slack-point")
    return None


def with_box(committed, dim: int):
    return list(committed) + box_halfspaces(dim, config.TOL.box)
