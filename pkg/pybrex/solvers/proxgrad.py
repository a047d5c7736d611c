import logging
from dataclasses import dataclass, field

import numpy as np

from pybrex.exceptions import NumericalFailure
from pybrex.relaxation.generators import NONNEG
from pybrex.relaxation.penalty import prox_brex
from pybrex.relaxation.problem import DEFAULT_CRITICAL_TOL


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool
    final_step: float
    criticality_residual: float
    trace: list = field(default_factory=list, repr=False)

    @property
    def support(self):
        return tuple(int(i) for i in np.flatnonzero(self.x))


class ProxGradientSolver:
    """
    Forward-backward splitting on JPsi = F + B_Psi.

    Each iteration applies the coordinate-wise B-rex prox to a gradient step on
    F; the step starts at 1/L_F and is halved until the quadratic upper model of
    F holds at the new point, which makes JPsi non-increasing.
    """

    def __init__(self, problem, tol=DEFAULT_CRITICAL_TOL, max_iter=10_000, backtrack=0.5, sufficient_decrease=1e-4):
        self.problem = problem
        self.tol = tol
        self.max_iter = max_iter
        self.backtrack = backtrack
        self.sufficient_decrease = sufficient_decrease
        self.logger = logging.getLogger(self.__class__.__name__)
        L_F = problem.smoothness
        self.initial_step = 1.0 / L_F if L_F > 0 else 1.0

    def _step(self, x, Fx, g):
        p = self.problem
        t = self.initial_step
        while True:
            v = x - t * g
            if p.constraint_set == NONNEG:
                v = np.where(np.isfinite(v), v, 0.0)
            xn = prox_brex(p.penalties, t, v)
            d = xn - x
            Fn = p.F(xn)
            model = Fx + float(g @ d) + (1.0 - self.sufficient_decrease) * float(d @ d) / (2.0 * t)
            if Fn <= model + 1e-15 * max(1.0, abs(Fx)):
                return xn, Fn, t
            t *= self.backtrack
            if t < 1e-20:
                raise NumericalFailure("backtracking collapsed", {"x": x.tolist(), "F": Fx})

    def solve(self, x0=None):
        p = self.problem
        x = np.zeros(p.N) if x0 is None else p.check(np.array(x0, dtype=float))
        J = p.JPsi(x)
        trace = [J]
        t = self.initial_step
        residual = p.is_critical(x, self.tol).max_residual
        for it in range(1, self.max_iter + 1):
            Fx = p.F(x)
            g = p.grad_F(x)
            xn, Fn, t = self._step(x, Fx, g)
            Jn = Fn + p.B(xn)
            if Jn > J + 1e-12 * max(1.0, abs(J)):
                self.logger.warning(f"objective increased at iteration {it}: {J:.15e} -> {Jn:.15e}")
            displacement = float(np.max(np.abs(xn - x))) if p.N else 0.0
            x, J = xn, Jn
            trace.append(J)
            self.logger.debug(f"iteration {it}: JPsi={J:.12e}, step={t:.3e}, displacement={displacement:.3e}")
            if displacement <= self.tol:
                report = p.is_critical(x, self.tol)
                residual = report.max_residual
                if report.is_critical:
                    self.logger.info(f"converged in {it} iterations, JPsi={J:.12e}, support={np.flatnonzero(x).tolist()}")
                    return SolveResult(x, J, it, True, t, residual, trace)
        residual = p.is_critical(x, self.tol).max_residual
        self.logger.warning(f"max_iter={self.max_iter} reached, criticality residual {residual:.3e}")
        return SolveResult(x, J, self.max_iter, False, t, residual, trace)


def prox_gradient(p, x0=None, **opts):
    return ProxGradientSolver(p, **opts).solve(x0)


def multistart(p, n_starts, rng, scale=None, **opts):
    """prox_gradient from zero and from n_starts - 1 random feasible points."""
    solver = ProxGradientSolver(p, **opts)
    scale = 2.0 * float(np.max(p.alphas)) if scale is None else scale
    results = [solver.solve(np.zeros(p.N))]
    for _ in range(max(n_starts - 1, 0)):
        x0 = rng.normal(0.0, scale, p.N)
        if p.constraint_set == NONNEG:
            x0 = np.abs(x0)
        results.append(solver.solve(x0))
    return results
