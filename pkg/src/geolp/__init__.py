"""Non-iterative geometric active-set heuristic for linear maximization."""
from .geometry import BodmpResult, CriterionDirection, LimiterChoice, NoInwardCrossing
from .model import Constraint, ConstraintClass, NormalizedProblem, Problem, Sense, ValidationError, canonicalize, validate
from .oracle import OracleResult, Status, check_feasibility, enumerate_vertices, simplex_solve
from .solver import (
    ActiveSet,
    DegenerateSelection,
    SingularBasis,
    Solved,
    SolverOptions,
    Unbounded,
    solve,
)

__version__ = "0.1.0"
