"""
The assembled problem: A, a separable fidelity G_y, generators psi_i and lambda0.

    J0(x)   = G_y(Ax) + lambda0 ||x||_0
    JPsi(x) = G_y(Ax) + B_Psi(x)
    H(x)    = B_Psi(x) + Psi(x)

and the optimality map z = grad Psi(x) - A^T grad G_y(Ax): x is critical for
JPsi iff z_i lies in the subdifferential of h_i at x_i for every i.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import norm as matrix_norm

from pybrex.exceptions import DomainError
from pybrex.relaxation.fidelity import cc_calibrate_kl, cc_calibrate_quadratic, DEFAULT_SAFETY
from pybrex.relaxation.generators import NONNEG, QuadraticGenerator, SmoothedKLGenerator
from pybrex.relaxation.penalty import BrexPenalty

DEFAULT_CRITICAL_TOL = 1e-8


def as_support(omega, N):
    """Validate an index set (0-based, strictly increasing) and return it as a tuple."""
    omega = tuple(int(i) for i in omega)
    if any(b <= a for a, b in zip(omega, omega[1:])):
        raise DomainError(f"support indices must be strictly increasing, got {omega}")
    if omega and (omega[0] < 0 or omega[-1] >= N):
        raise DomainError(f"support {omega} out of range for N={N}")
    return omega


def support_of(x, tol=0.0):
    return tuple(int(i) for i in np.flatnonzero(np.abs(np.asarray(x, dtype=float)) > tol))


def zero_pad(omega, u, N):
    u = np.asarray(u, dtype=float).ravel()
    omega = as_support(omega, N)
    if len(omega) != u.size:
        raise DomainError(f"support of size {len(omega)} cannot carry {u.size} values")
    x = np.zeros(N)
    x[list(omega)] = u
    return x


def restrict(omega, x):
    return np.asarray(x, dtype=float)[list(omega)]


@dataclass(frozen=True)
class CriticalityReport:
    z: np.ndarray
    residuals: np.ndarray
    tol: float
    is_critical: bool

    @property
    def max_residual(self):
        return float(self.residuals.max()) if self.residuals.size else 0.0


@dataclass(frozen=True)
class IsolationReport:
    ok: bool
    margins: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray
    C_K: float


@dataclass(frozen=True)
class PreservationReport:
    """Whether a J0 local minimizer survives as a JPsi local minimizer, coordinate by coordinate."""
    preserved: bool
    on_support: dict = field(default_factory=dict)
    off_support: dict = field(default_factory=dict)


class Problem:
    def __init__(self, A, fidelity, generators, lambda0, calibration=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape[0] != fidelity.M:
            raise DomainError(f"A has {A.shape[0]} rows but the fidelity has {fidelity.M} measurements")
        if len(generators) != A.shape[1]:
            raise DomainError(f"need one generator per column: {len(generators)} for N={A.shape[1]}")
        sets = {g.constraint_set for g in generators}
        if len(sets) != 1:
            raise DomainError(f"generators disagree on the constraint set: {sets}")
        constraint_set = sets.pop()
        if fidelity.kind == "kl":
            if np.any(A < 0):
                raise DomainError("the KL fidelity needs an entrywise nonnegative matrix")
            if constraint_set != NONNEG:
                raise DomainError("the KL fidelity needs the nonnegative constraint set")
        self.A = A
        self.fidelity = fidelity
        self.generators = list(generators)
        self.constraint_set = constraint_set
        self.calibration = dict(calibration or {})
        self.penalties = [BrexPenalty(g, lambda0) for g in self.generators]
        self.lambda0 = self.penalties[0].lambda0 if self.penalties else float(lambda0)
        self._lipschitz = None
        self.logger = logging.getLogger(self.__class__.__name__)

    @classmethod
    def calibrated(cls, A, fidelity, lambda0, psi="l2", constraint_set=None, safety=DEFAULT_SAFETY, gamma=None, xi=None):
        """
        Build a problem whose generators satisfy the concavity condition.

        psi="l2" uses a common quadratic generator (gamma from the column norms
        unless given); psi="kl" uses per-column smoothed KL generators.
        """
        A = np.atleast_2d(np.asarray(A, dtype=float))
        N = A.shape[1]
        if psi == "l2":
            if gamma is None:
                if fidelity.kind != "ls":
                    raise DomainError("a quadratic generator under the KL fidelity needs an explicit gamma")
                gamma = cc_calibrate_quadratic(fidelity, A, safety)
            cs = constraint_set or (NONNEG if fidelity.kind == "kl" else "reals")
            gens = [QuadraticGenerator(gamma, cs) for _ in range(N)]
            calibration = {"psi": "l2", "gamma": float(gamma), "safety": safety}
        elif psi == "kl":
            xi, c, gammas = cc_calibrate_kl(fidelity, A, safety, xi)
            gens = [SmoothedKLGenerator(g, ci, xi) for g, ci in zip(gammas, c)]
            calibration = {"psi": "kl", "xi": xi, "c": c, "gamma": gammas, "safety": safety}
        else:
            raise ValueError(f"Unknown generator family: {psi}")
        return cls(A, fidelity, gens, lambda0, calibration)

    def with_lambda0(self, lambda0):
        return Problem(self.A, self.fidelity, self.generators, lambda0, self.calibration)

    @property
    def N(self):
        return self.A.shape[1]

    @property
    def M(self):
        return self.A.shape[0]

    @property
    def alphas(self):
        return np.array([p.alpha for p in self.penalties])

    @property
    def slopes_alpha(self):
        return np.array([p.threshold.slope_alpha for p in self.penalties])

    @property
    def slopes_zero(self):
        return np.array([p.threshold.slope_zero for p in self.penalties])

    @property
    def column_norms(self):
        return np.sqrt(np.sum(self.A * self.A, axis=0))

    @property
    def lipschitz(self):
        if self._lipschitz is None:
            self._lipschitz = self.fidelity.lipschitz_info(self.A)
        return self._lipschitz

    @property
    def smoothness(self):
        """L * ||A||_2^2, the Lipschitz constant of grad F."""
        return self.lipschitz.L * float(matrix_norm(self.A, 2)) ** 2

    def check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.N,):
            raise DomainError(f"expected a vector of length {self.N}, got shape {x.shape}")
        if self.constraint_set == NONNEG and np.any(x < 0):
            raise DomainError(f"x has negative entries on the nonnegative constraint set: {x}")
        return x

    def F(self, x):
        return self.fidelity.value(self.A @ self.check(x))

    def grad_F(self, x):
        return self.A.T @ self.fidelity.gradient(self.A @ self.check(x))

    def B(self, x):
        x = self.check(x)
        return float(sum(p.value(xi) for p, xi in zip(self.penalties, x)))

    def Psi(self, x):
        x = self.check(x)
        return float(sum(g._value(xi) for g, xi in zip(self.generators, x)))

    def grad_Psi(self, x):
        x = self.check(x)
        return np.array([float(g._first(xi)) for g, xi in zip(self.generators, x)])

    def J0(self, x):
        x = self.check(x)
        return self.F(x) + self.lambda0 * np.count_nonzero(x)

    def JPsi(self, x):
        return self.F(x) + self.B(x)

    def H(self, x):
        return self.B(x) + self.Psi(x)

    def JPsi_columns(self, X):
        """JPsi on every column of X (used by grid scans)."""
        X = np.asarray(X, dtype=float)
        penalty = sum(np.asarray(p.value(X[i]), dtype=float) for i, p in enumerate(self.penalties))
        return self.fidelity.value_columns(self.A @ X) + penalty

    def compute_z(self, x):
        return self.grad_Psi(x) - self.grad_F(x)

    def is_critical(self, x, tol=DEFAULT_CRITICAL_TOL):
        x = self.check(x)
        z = self.compute_z(x)
        residuals = np.array([
            p.h_subdiff(xi).distance(zi) / (1.0 + abs(p.threshold.slope_alpha))
            for p, xi, zi in zip(self.penalties, x, z)
        ])
        critical = bool(residuals.size == 0 or residuals.max() <= tol)
        return CriticalityReport(z=z, residuals=residuals, tol=tol, is_critical=critical)

    def isolation_check(self, x, C_K, tol=DEFAULT_CRITICAL_TOL):
        """
        Sparsity isolation of a critical point: every |z_i| must avoid
        [C_K gap_i + psi_i'(0), gap_i / C_K + psi_i'(0)] with gap_i = psi_i'(alpha_i) - psi_i'(0).

        Margins are signed distances to that band (positive outside).
        """
        if C_K <= 0:
            raise DomainError(f"isolation needs a positive BRSC constant, got {C_K}")
        report = self.is_critical(x, tol)
        if not report.is_critical:
            self.logger.warning(f"isolation checked at a non-critical point (max residual {report.max_residual:.3e})")
        az = np.abs(report.z)
        gap = self.slopes_alpha - self.slopes_zero
        lo = C_K * gap + self.slopes_zero
        hi = gap / C_K + self.slopes_zero
        if C_K > 1:
            margins = np.full(self.N, math.inf)
            return IsolationReport(ok=True, margins=margins, band_lo=lo, band_hi=hi, C_K=C_K)
        margins = np.maximum(lo - az, az - hi)
        return IsolationReport(ok=bool(np.all(margins > 0)), margins=margins, band_lo=lo, band_hi=hi, C_K=C_K)

    def uniqglob_threshold(self, x, K):
        k = np.count_nonzero(self.check(x))
        if K < 2 * k:
            raise DomainError(f"threshold undefined: K={K} < 2||x||_0={2 * k}")
        return self.F(x) / (1 + K - 2 * k)

    def j0_local_min_preserved(self, x):
        x = self.check(x)
        sigma = np.abs(x) > 0
        corr = -(self.A.T @ self.fidelity.gradient(self.A @ x))
        gap = self.slopes_alpha - self.slopes_zero
        lower = -math.inf if self.constraint_set == NONNEG else None
        on_support, off_support = {}, {}
        for i in range(self.N):
            if sigma[i]:
                on_support[i] = abs(x[i]) - self.penalties[i].alpha
            else:
                lo = lower if lower is not None else -self.slopes_alpha[i] - self.slopes_zero[i]
                off_support[i] = min(corr[i] - lo, gap[i] - corr[i])
        preserved = all(m > 0 for m in on_support.values()) and all(m >= 0 for m in off_support.values())
        return PreservationReport(preserved=preserved, on_support=on_support, off_support=off_support)

    def concavity_profile(self, x, i, n=64):
        """Second differences of t -> JPsi(x with x_i = t) on an n-point grid of (0, alpha_i)."""
        x = self.check(x).copy()
        ts = np.linspace(0.0, self.penalties[i].alpha, n + 2)[1:-1]
        vals = []
        for t in ts:
            x[i] = t
            vals.append(self.JPsi(x))
        return np.diff(np.asarray(vals), 2)

    def __repr__(self):
        return (f"Problem(M={self.M}, N={self.N}, fidelity={self.fidelity!r}, "
                f"lambda0={self.lambda0}, constraint_set={self.constraint_set!r})")


def eval_J0(p, x):
    return p.J0(x)


def eval_JPsi(p, x):
    return p.JPsi(x)


def eval_H(p, x):
    return p.H(x)


def compute_z(p, x):
    return p.compute_z(x)


def is_critical(p, x, tol=DEFAULT_CRITICAL_TOL):
    return p.is_critical(x, tol)


def isolation_check(p, x, C_K):
    return p.isolation_check(x, C_K)


def uniqglob_threshold(p, x, K):
    return p.uniqglob_threshold(x, K)
