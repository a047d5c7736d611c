"""
Exhaustive minimization of J0 over every support of size at most k_max.

The restricted solves do not depend on lambda0, so a support table is built
once and reused for every lambda0 that is checked against it.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from pybrex.exceptions import GuardViolation, SupportNotIdentifiable
from pybrex.relaxation.problem import zero_pad
from pybrex.solvers.restricted import restricted_convex_solve

MAX_N = 24
TIE_TOL = 1e-12

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportRow:
    support: tuple
    u: np.ndarray
    F_value: float


@dataclass(frozen=True)
class SupportTable:
    N: int
    k_max: int
    rows: list
    skipped: list = field(default_factory=list)

    def J0(self, lambda0):
        return np.array([row.F_value + lambda0 * len(row.support) for row in self.rows])


@dataclass(frozen=True)
class BruteForceResult:
    best_support: tuple
    x_best: np.ndarray
    J0_value: float
    optima: list
    table: SupportTable
    lambda0: float

    @property
    def unique(self):
        return len(self.optima) == 1


def enumerate_supports(N, k_max):
    for k in range(k_max + 1):
        yield from itertools.combinations(range(N), k)


def _solve_row(p, omega):
    try:
        sol = restricted_convex_solve(p, omega)
    except SupportNotIdentifiable as e:
        logger.warning(f"skipping support {omega}: {e}")
        return None
    logger.debug(f"support {omega}: F={sol.F_value:.12e}")
    return SupportRow(sol.support, sol.u, sol.F_value)


def support_table(p, k_max=None, workers=1):
    N = p.N
    if N > MAX_N:
        raise GuardViolation(f"brute force needs N <= {MAX_N}, got N={N}")
    k_max = N if k_max is None else int(k_max)
    if not 0 <= k_max <= N:
        raise GuardViolation(f"k_max must lie in [0, {N}], got {k_max}")
    supports = list(enumerate_supports(N, k_max))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(lambda omega: _solve_row(p, omega), supports))
    else:
        solved = [_solve_row(p, omega) for omega in supports]
    rows = [r for r in solved if r is not None]
    skipped = [omega for omega, r in zip(supports, solved) if r is None]
    logger.info(f"support table: {len(rows)} supports solved, {len(skipped)} skipped (N={N}, k_max={k_max})")
    return SupportTable(N=N, k_max=k_max, rows=rows, skipped=skipped)


def select_best(table, lambda0):
    """Argmin of J0 over the table; rows within TIE_TOL of the minimum are all reported as optima."""
    values = table.J0(lambda0)
    best = float(values.min())
    optima = [table.rows[i].support for i in np.flatnonzero(values <= best + TIE_TOL)]
    row = table.rows[int(np.argmin(values))]
    if len(optima) > 1:
        logger.warning(f"lambda0={lambda0}: {len(optima)} supports tie at J0={best:.12e}: {optima}")
    return BruteForceResult(
        best_support=row.support,
        x_best=zero_pad(row.support, row.u, table.N),
        J0_value=best,
        optima=optima,
        table=table,
        lambda0=lambda0,
    )


def brute_force_l0(p, k_max=None, workers=1):
    return select_best(support_table(p, k_max, workers), p.lambda0)
