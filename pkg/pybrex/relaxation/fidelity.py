"""
Separable data terms G_y(w) = sum_j g_{y_j}(w_j).

LeastSquaresFidelity: g_y(w) = (w - y)^2 / 2, defined on all of R^M.
KullbackLeiblerFidelity: g_y(w) = z + y log(y / z) - y with z = w + b, b > 0,
defined for w + b > 0 (0 log 0 = 0 when y = 0).
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from pybrex.exceptions import DomainError

logger = logging.getLogger(__name__)

DEFAULT_SAFETY = 1.0 + 1e-6


@dataclass(frozen=True)
class LipschitzInfo:
    L: float
    L_tilde: float
    margin_delta: float
    grad_sup_theta: float


class Fidelity(ABC):
    kind = None
    strong_convexity_nu = 0.0

    def __init__(self, y):
        self.y = np.asarray(y, dtype=float).ravel()
        if not np.all(np.isfinite(self.y)):
            raise DomainError("measurements must be finite")

    @property
    def M(self):
        return self.y.size

    def _check_shape(self, w):
        w = np.asarray(w, dtype=float)
        if w.shape != self.y.shape:
            raise DomainError(f"expected a vector of length {self.M}, got shape {w.shape}")
        return w

    @abstractmethod
    def in_domain(self, w):
        pass

    @abstractmethod
    def value(self, w):
        pass

    @abstractmethod
    def gradient(self, w):
        pass

    def evaluate(self, w):
        return self.value(w), self.gradient(w)

    @abstractmethod
    def value_columns(self, W):
        """G_y evaluated on every column of W."""

    @abstractmethod
    def curvature_sup(self):
        """Per-row sup over w >= 0 of g''_j."""

    @abstractmethod
    def lipschitz_info(self, A):
        pass

    def symmetric_divergence(self, A, x, xp):
        """<A^T (grad G(Ax) - grad G(Ax')), x - x'>."""
        A = np.asarray(A, dtype=float)
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        return float(np.dot(self.gradient(A @ x) - self.gradient(A @ xp), A @ (x - xp)))


class LeastSquaresFidelity(Fidelity):
    kind = "ls"
    strong_convexity_nu = 1.0

    def in_domain(self, w):
        return bool(np.all(np.isfinite(w)))

    def value(self, w):
        r = self._check_shape(w) - self.y
        return 0.5 * float(np.dot(r, r))

    def gradient(self, w):
        return self._check_shape(w) - self.y

    def value_columns(self, W):
        R = np.asarray(W, dtype=float) - self.y[:, None]
        return 0.5 * np.sum(R * R, axis=0)

    def curvature_sup(self):
        return np.ones(self.M)

    def lipschitz_info(self, A=None):
        return LipschitzInfo(L=1.0, L_tilde=1.0, margin_delta=math.inf, grad_sup_theta=math.inf)

    def __repr__(self):
        return f"LeastSquaresFidelity(M={self.M})"


class KullbackLeiblerFidelity(Fidelity):
    kind = "kl"

    def __init__(self, y, b):
        super().__init__(y)
        if np.any(self.y < 0):
            raise DomainError("KL measurements must be nonnegative")
        self.b = np.broadcast_to(np.asarray(b, dtype=float), self.y.shape).copy()
        if np.any(self.b <= 0):
            raise DomainError("KL background must be strictly positive")
        self._observed = self.y > 0

    def in_domain(self, w):
        w = np.asarray(w, dtype=float)
        return bool(np.all(w + self.b > 0))

    def _shifted(self, w):
        w = self._check_shape(w)
        z = w + self.b
        if np.any(z <= 0):
            raise DomainError(f"KL fidelity needs w + b > 0, min(w + b) = {z.min()}")
        return z

    def value(self, w):
        z = self._shifted(w)
        obs = self._observed
        terms = z - self.y
        terms[obs] += self.y[obs] * np.log(self.y[obs] / z[obs])
        return float(np.sum(terms))

    def gradient(self, w):
        z = self._shifted(w)
        return 1.0 - self.y / z

    def value_columns(self, W):
        Z = np.asarray(W, dtype=float) + self.b[:, None]
        if np.any(Z <= 0):
            raise DomainError("KL fidelity needs w + b > 0 on every column")
        obs = self._observed
        terms = Z - self.y[:, None]
        terms[obs] += self.y[obs, None] * np.log(self.y[obs, None] / Z[obs])
        return np.sum(terms, axis=0)

    def curvature_sup(self):
        return self.y / self.b ** 2

    def lipschitz_info(self, A=None):
        if A is not None and np.any(np.asarray(A) < 0):
            raise DomainError("KL Lipschitz bounds assume an entrywise nonnegative matrix")
        L = float(np.max(self.y / self.b ** 2))
        delta = float(np.min(self.b))
        theta = float(np.sqrt(np.sum(np.maximum(np.abs(1.0 - self.y / self.b), 1.0) ** 2)))
        eta = min(1.0 / L if L > 0 else math.inf, 0.99 * delta / theta)
        L_tilde = 1.0 / (2.0 * eta - L * eta * eta)
        return LipschitzInfo(L=L, L_tilde=max(L_tilde, L), margin_delta=delta, grad_sup_theta=theta)

    def __repr__(self):
        return f"KullbackLeiblerFidelity(M={self.M}, min_b={self.b.min()})"


def fidelity_from_kind(kind, y, b=None):
    if kind == "ls":
        return LeastSquaresFidelity(y)
    elif kind == "kl":
        if b is None:
            raise DomainError("KL fidelity needs a background vector b")
        return KullbackLeiblerFidelity(y, b)
    else:
        raise ValueError(f"Unknown fidelity kind: {kind}")


def fid_eval(f, w):
    return f.evaluate(w)


def lipschitz_info(f, A):
    return f.lipschitz_info(A)


def _column_norms_sq(A):
    A = np.asarray(A, dtype=float)
    norms = np.sum(A * A, axis=0)
    if np.any(norms == 0):
        raise DomainError(f"matrix has zero columns at {np.flatnonzero(norms == 0).tolist()}")
    return norms


def cc_calibrate_quadratic(f, A, safety=DEFAULT_SAFETY):
    """
    gamma for Psi = (gamma/2)||.||^2 satisfying the concavity condition under least squares.

    The condition is strict, so a largest squared column norm of exactly 1
    (A = I) gives gamma = safety * 1, not 1; only max ||a_i||^2 < 1 returns 1.
    """
    if f.kind != "ls":
        raise DomainError("quadratic calibration is for the least-squares fidelity; use cc_calibrate_kl")
    if safety <= 1:
        raise DomainError(f"safety factor must be > 1, got {safety}")
    worst = float(np.max(_column_norms_sq(A)))
    if worst < 1.0:
        return 1.0
    return safety * worst


def cc_calibrate_kl(f, A, safety=DEFAULT_SAFETY, xi=None):
    """
    (xi, c, gamma) for the smoothed KL generators under the KL fidelity.

    xi defaults to min(b); a user-supplied xi must lie in (0, min(b)].
    """
    if f.kind != "kl":
        raise DomainError("KL calibration needs a KL fidelity")
    if safety <= 1:
        raise DomainError(f"safety factor must be > 1, got {safety}")
    A = np.asarray(A, dtype=float)
    if np.any(A < 0):
        raise DomainError("KL calibration needs an entrywise nonnegative matrix")
    _column_norms_sq(A)
    b_min = float(np.min(f.b))
    if xi is None:
        xi = b_min
    elif not 0 < xi <= b_min:
        raise DomainError(f"xi must lie in (0, min(b)={b_min}], got {xi}")
    xi = float(xi)
    c = np.array([A[A[:, i] > 0, i].min() for i in range(A.shape[1])])
    bound = (A * A).T @ f.y / (c * c * xi)
    floor = max(safety - 1.0, 1e-8)
    gamma = np.where(bound > 0, safety * bound, floor)
    logger.debug(f"KL calibration: xi={xi}, c={c}, gamma={gamma}")
    return xi, c, gamma
