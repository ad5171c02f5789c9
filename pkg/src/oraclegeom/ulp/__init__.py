"""Undecided linear programming solvers."""
from .centerpoint import solve_ulp_centerpoint
from .cutting import CuttingCell, CuttingError, build_cutting_2d, solve_ulp_cutting_2d
from .naive import solve_ulp_naive
from .oned import LineView, solve_ulp_1d
from .reduce import AvoidingPolytope, Feasible, reduce_point_set, reduce_polygon
from .result import CapacityError, QuerySession, SolverDiagnostic, UlpResult
from .seplab import solve_ulp_seplab_2d

__all__ = [
    "AvoidingPolytope", "CapacityError", "CuttingCell", "CuttingError", "Feasible", "LineView",
    "QuerySession", "SolverDiagnostic", "UlpResult", "build_cutting_2d", "reduce_point_set",
    "reduce_polygon", "solve_ulp_1d", "solve_ulp_centerpoint", "solve_ulp_cutting_2d",
    "solve_ulp_naive", "solve_ulp_seplab_2d",
]
