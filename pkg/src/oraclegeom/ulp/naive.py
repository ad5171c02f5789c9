"""The plain counterexample loop: query an LP vertex of what is known, repeat."""
from __future__ import annotations

from ..lp import LpInstance, lp_solve
from .result import QuerySession, SolverDiagnostic, UlpResult


def solve_ulp_naive(planes, oracle, dim: int, *, max_iterations: int | None = None,
                    session: QuerySession | None = None) -> UlpResult:
    """Query the lexicographic LP vertex of the committed halfspaces until it is feasible.

    Each answer rules out a single constraint, so up to ``n + 1`` queries may be needed.
    """
    session = session or QuerySession(oracle, dim)
    cap = (len(planes) + 1) if max_iterations is None else max_iterations
    for it in range(cap + 1):
        res = lp_solve(LpInstance(dim, list(session.committed)), 0)
        if not res.feasible:
            return session.infeasible(iterations=it)
        if session.query(res.point) is None:
            return session.feasible(res.point, iterations=it + 1)
    raise SolverDiagnostic(f"counterexample loop made no progress in {cap} iterations")
