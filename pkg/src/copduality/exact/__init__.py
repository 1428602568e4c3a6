"""Exact rational substrate: linear algebra and a certifying simplex solver."""
from .linalg import (
    LinearSolution,
    dot,
    matvec,
    nullspace,
    orthogonal_basis,
    project_onto_complement,
    rank,
    rref,
    solve_linear,
    transpose,
)
from .simplex import EQ, GE, LE, LPInstance, LPOutcome, is_feasible, solve_lp, verify_outcome

__all__ = [
    "EQ", "GE", "LE",
    "LPInstance", "LPOutcome", "LinearSolution",
    "dot", "is_feasible", "matvec", "nullspace", "orthogonal_basis",
    "project_onto_complement", "rank", "rref", "solve_linear", "solve_lp",
    "transpose", "verify_outcome",
]
