"""
Convex solves of F restricted to a fixed support, and the oracle solution.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lstsq, solve, svdvals, LinAlgError
from scipy.optimize import nnls

from pybrex.exceptions import NumericalFailure, SupportNotIdentifiable
from pybrex.relaxation.generators import NONNEG
from pybrex.relaxation.problem import as_support, zero_pad

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
KKT_TOL = 1e-10
MAX_ITER = 100_000


@dataclass(frozen=True)
class RestrictedSolution:
    support: tuple
    u: np.ndarray
    F_value: float
    iterations: int
    kkt_residual: float


@dataclass(frozen=True)
class OracleSolution:
    support: tuple
    u_or: np.ndarray
    x_or: np.ndarray
    F_value: float
    F_star: Optional[float] = None

    @property
    def k_star(self):
        return len(self.support)


def check_identifiable(A_omega, omega):
    if A_omega.shape[1] == 0:
        return
    if A_omega.shape[1] > A_omega.shape[0]:
        raise SupportNotIdentifiable(omega, 0.0)
    s = svdvals(A_omega)
    ratio = float(s.min() / s.max()) if s.max() > 0 else 0.0
    if ratio <= RANK_TOL:
        raise SupportNotIdentifiable(omega, ratio)


def restricted_convex_solve(p, omega, tol=KKT_TOL, max_iter=MAX_ITER):
    """
    Minimize F(Z_omega(u)) over u in C^{#omega}.

    Least squares over R uses an SVD least-squares solve, least squares over the
    nonnegative orthant uses NNLS, the KL fidelity uses projected gradient with
    Barzilai-Borwein steps and Armijo backtracking.
    """
    omega = as_support(omega, p.N)
    A_omega = p.A[:, list(omega)]
    if not omega:
        return RestrictedSolution(omega, np.zeros(0), p.fidelity.value(np.zeros(p.M)), 0, 0.0)
    check_identifiable(A_omega, omega)
    if p.fidelity.kind == "ls":
        if p.constraint_set == NONNEG:
            u, _ = nnls(A_omega, p.fidelity.y)
        else:
            u = lstsq(A_omega, p.fidelity.y, lapack_driver="gelsd")[0]
        grad = A_omega.T @ p.fidelity.gradient(A_omega @ u)
        return RestrictedSolution(omega, u, p.fidelity.value(A_omega @ u), 1, _kkt(u, grad, p.constraint_set))
    return _projected_gradient(p.fidelity, A_omega, omega, tol, max_iter)


def _kkt(u, grad, constraint_set):
    if constraint_set == NONNEG:
        return float(np.max(np.abs(u - np.maximum(u - grad, 0.0)))) if u.size else 0.0
    return float(np.max(np.abs(grad))) if u.size else 0.0


def _projected_gradient(fidelity, A_omega, omega, tol, max_iter):
    def F(u):
        return fidelity.value(A_omega @ u)

    def grad(u):
        return A_omega.T @ fidelity.gradient(A_omega @ u)

    L = fidelity.lipschitz_info(A_omega).L * float(np.linalg.norm(A_omega, 2)) ** 2
    u = nnls(A_omega, np.maximum(fidelity.y - fidelity.b, 0.0))[0]
    Fu, g = F(u), grad(u)
    step = 1.0 / L if L > 0 else 1.0
    kkt = _kkt(u, g, NONNEG)
    for it in range(1, max_iter + 1):
        if kkt <= tol:
            return RestrictedSolution(omega, u, Fu, it - 1, kkt)
        t = step
        while True:
            un = np.maximum(u - t * g, 0.0)
            Fn = F(un)
            if Fn <= Fu + 1e-4 * float(g @ (un - u)) or t < 1e-30:
                break
            t *= 0.5
        gn = grad(un)
        s, r = un - u, gn - g
        sr = float(s @ r)
        step = float(s @ s) / sr if sr > 0 else step
        u, Fu, g = un, Fn, gn
        kkt = _kkt(u, g, NONNEG)
        if kkt <= 1e-6:
            u, Fu, g, kkt = _newton_polish(fidelity, A_omega, u, Fu, g, kkt)
    raise NumericalFailure(f"restricted KL solve on {omega} did not reach KKT tolerance",
                           {"support": omega, "kkt_residual": kkt, "iterations": max_iter, "F": Fu})


def _newton_polish(fidelity, A_omega, u, Fu, g, kkt):
    free = (u > 0) | (g < 0)
    if not np.any(free):
        return u, Fu, g, kkt
    w = A_omega @ u
    weights = fidelity.y / (w + fidelity.b) ** 2
    Af = A_omega[:, free]
    hess = Af.T @ (weights[:, None] * Af)
    try:
        d = solve(hess, -g[free], assume_a="pos")
    except (LinAlgError, ValueError):
        return u, Fu, g, kkt
    cand = u.copy()
    cand[free] = np.maximum(u[free] + d, 0.0)
    Fc = fidelity.value(A_omega @ cand)
    gc = A_omega.T @ fidelity.gradient(A_omega @ cand)
    kc = _kkt(cand, gc, NONNEG)
    if Fc <= Fu and kc < kkt:
        return cand, Fc, gc, kc
    return u, Fu, g, kkt


def oracle_solve(p, sigma_star, x_star=None):
    sol = restricted_convex_solve(p, sigma_star)
    x_or = zero_pad(sol.support, sol.u, p.N)
    F_star = None
    if x_star is not None:
        F_star = p.F(np.asarray(x_star, dtype=float))
        if sol.F_value > F_star + 1e-9 * max(1.0, abs(F_star)):
            logger.warning(f"oracle value {sol.F_value:.6e} exceeds F(x*)={F_star:.6e} on {sol.support}")
    return OracleSolution(support=sol.support, u_or=sol.u, x_or=x_or, F_value=sol.F_value, F_star=F_star)
