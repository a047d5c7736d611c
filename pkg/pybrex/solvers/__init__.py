from .restricted import restricted_convex_solve, oracle_solve, OracleSolution, RestrictedSolution
from .proxgrad import ProxGradientSolver, SolveResult, prox_gradient, multistart
from .bruteforce import BruteForceResult, brute_force_l0, support_table, select_best

__all__ = [
    "restricted_convex_solve",
    "oracle_solve",
    "OracleSolution",
    "RestrictedSolution",
    "ProxGradientSolver",
    "SolveResult",
    "prox_gradient",
    "multistart",
    "BruteForceResult",
    "brute_force_l0",
    "support_table",
    "select_best",
]
