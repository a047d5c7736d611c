"""
Scalar Bregman generators psi_i and their calculus.

Two families are provided: the quadratic generator (gamma/2) x**2 and the
smoothed Kullback-Leibler generator gamma * g_xi(c x + xi) with
g_xi(z) = z + xi log(xi / z) - xi. Both have psi(0) = 0 and a strictly
convex, increasing derivative on the constraint set.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from pybrex.exceptions import DomainError, NumericalFailure
from pybrex.relaxation.lambertw import lambert_w0

REALS = "reals"
NONNEG = "nonneg"
CONSTRAINT_SETS = (REALS, NONNEG)

logger = logging.getLogger(__name__)


def g1kl(t):
    """t - log t - 1, accurate near t = 1."""
    t = np.asarray(t, dtype=float)
    d = t - 1.0
    out = d - np.log1p(d)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Threshold:
    alpha: float
    lambda0: float
    slope_alpha: float
    slope_zero: float

    @property
    def gap(self):
        """psi'(alpha) - psi'(0), the half-width of the zero subdifferential of h."""
        return self.slope_alpha - self.slope_zero


class BregmanGenerator(ABC):
    kind = None

    def __init__(self, gamma, constraint_set=REALS):
        if not np.isfinite(gamma) or gamma <= 0:
            raise DomainError(f"{self.kind} generator needs gamma > 0, got {gamma}")
        if constraint_set not in CONSTRAINT_SETS:
            raise DomainError(f"Unknown constraint set: {constraint_set}")
        self.gamma = float(gamma)
        self.constraint_set = constraint_set

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        if self.constraint_set == NONNEG:
            return bool(np.all(x >= 0.0))
        return bool(np.all(np.isfinite(x)))

    def check(self, x):
        if not self.contains(x):
            raise DomainError(f"{x} is outside the constraint set {self.constraint_set} of {self!r}")

    @abstractmethod
    def _value(self, x):
        pass

    @abstractmethod
    def _first(self, x):
        pass

    @abstractmethod
    def _second(self, x):
        pass

    def value(self, x):
        self.check(x)
        return self._value(np.asarray(x, dtype=float))

    def first(self, x):
        self.check(x)
        return self._first(np.asarray(x, dtype=float))

    def second(self, x):
        self.check(x)
        return self._second(np.asarray(x, dtype=float))

    def calculus(self, x):
        self.check(x)
        x = float(x)
        return float(self._value(x)), float(self._first(x)), float(self._second(x))

    def divergence(self, x, xp):
        self.check(x)
        self.check(xp)
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        return np.maximum(self._value(x) - self._value(xp) - self._first(xp) * (x - xp), 0.0)

    def symmetric_divergence(self, x, xp):
        """(psi'(x) - psi'(x'))(x - x'), the sum of both divergence orderings."""
        self.check(x)
        self.check(xp)
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        return (self._first(x) - self._first(xp)) * (x - xp)

    @abstractmethod
    def derivative_inverse(self, s):
        """Point x of the constraint set with psi'(x) = s (+inf when s is out of range)."""

    @abstractmethod
    def curvature_crossing(self, step):
        """Smallest x >= 0 beyond which psi''(x) <= 1/step (+inf if never)."""

    @abstractmethod
    def _alpha_estimate(self, lambda0):
        pass

    def threshold(self, lambda0):
        if not np.isfinite(lambda0) or lambda0 <= 0:
            raise DomainError(f"lambda0 must be positive, got {lambda0}")
        alpha = self._polish_alpha(self._alpha_estimate(lambda0), lambda0)
        return Threshold(alpha=alpha, lambda0=float(lambda0),
                         slope_alpha=float(self._first(alpha)), slope_zero=float(self._first(0.0)))

    def _polish_alpha(self, alpha, lambda0):
        def excess(a):
            return float(self.divergence(0.0, a)) - lambda0

        tol = 1e-13 * max(1.0, lambda0)
        for _ in range(3):
            r = excess(alpha)
            if abs(r) <= tol:
                return alpha
            slope = float(self._second(alpha)) * alpha
            if slope <= 0:
                break
            candidate = alpha - r / slope
            if candidate <= 0 or abs(excess(candidate)) >= abs(r):
                break
            alpha = candidate
        if abs(excess(alpha)) <= tol:
            return alpha
        hi = max(alpha, 1e-12)
        while excess(hi) < 0:
            hi *= 2.0
            if hi > 1e300:
                raise NumericalFailure("threshold bracket overflow", {"lambda0": lambda0, "generator": repr(self)})
        logger.debug(f"Newton polish insufficient for {self!r}, lambda0={lambda0}; bracketing on (0, {hi}]")
        return brentq(excess, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


class QuadraticGenerator(BregmanGenerator):
    kind = "quadratic"

    def _value(self, x):
        return 0.5 * self.gamma * x * x

    def _first(self, x):
        return self.gamma * x

    def _second(self, x):
        return self.gamma * np.ones_like(x)

    def divergence(self, x, xp):
        self.check(x)
        self.check(xp)
        d = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
        return 0.5 * self.gamma * d * d

    def derivative_inverse(self, s):
        return s / self.gamma

    def curvature_crossing(self, step):
        return 0.0 if self.gamma * step < 1.0 else np.inf

    def _alpha_estimate(self, lambda0):
        return float(np.sqrt(2.0 * lambda0 / self.gamma))

    def __repr__(self):
        return f"QuadraticGenerator(gamma={self.gamma}, constraint_set={self.constraint_set!r})"


class SmoothedKLGenerator(BregmanGenerator):
    """
    psi(x) = gamma * ((c x + xi) + xi log(xi / (c x + xi)) - xi) on x >= 0.

    psi'(x) = gamma c (1 - xi / (c x + xi)) and psi''(x) = gamma c^2 xi / (c x + xi)^2,
    so psi'(0) = 0 and psi' saturates at gamma c.
    """
    kind = "smoothed_kl"

    def __init__(self, gamma, c, xi, constraint_set=NONNEG):
        super().__init__(gamma, constraint_set)
        if constraint_set != NONNEG:
            raise DomainError("the smoothed KL generator lives on the nonnegative half-line")
        if not np.isfinite(c) or c <= 0 or not np.isfinite(xi) or xi <= 0:
            raise DomainError(f"smoothed KL generator needs c > 0 and xi > 0, got c={c}, xi={xi}")
        self.c = float(c)
        self.xi = float(xi)

    def _value(self, x):
        t = self.c * x / self.xi
        return self.gamma * self.xi * (t - np.log1p(t))

    def _first(self, x):
        z = self.c * x + self.xi
        return self.gamma * self.c * (1.0 - self.xi / z)

    def _second(self, x):
        z = self.c * x + self.xi
        return self.gamma * self.c * self.c * self.xi / (z * z)

    def divergence(self, x, xp):
        self.check(x)
        self.check(xp)
        ratio = (self.c * np.asarray(x, dtype=float) + self.xi) / (self.c * np.asarray(xp, dtype=float) + self.xi)
        return self.gamma * self.xi * g1kl(ratio)

    def derivative_inverse(self, s):
        cap = self.gamma * self.c
        if s >= cap:
            return np.inf
        if s <= 0:
            return 0.0
        return (self.xi / (1.0 - s / cap) - self.xi) / self.c

    def curvature_crossing(self, step):
        return max(0.0, (self.c * np.sqrt(self.gamma * self.xi * step) - self.xi) / self.c)

    def _alpha_estimate(self, lambda0):
        kappa = lambda0 / (self.gamma * self.xi) + 1.0
        if kappa > 700.0:
            raise NumericalFailure("smoothed KL threshold overflows", {"kappa": kappa, "generator": repr(self)})
        w = lambert_w0(-np.exp(-kappa))
        return float((-1.0 / self.c) * (self.xi / w + self.xi))

    def __repr__(self):
        return f"SmoothedKLGenerator(gamma={self.gamma}, c={self.c}, xi={self.xi})"


class BurgReference:
    """
    Burg entropy phi(x) = -sum log(x + eta) used as the reference geometry
    of the KL restricted strong convexity constants. Not a B-rex generator.
    """

    def __init__(self, eta):
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        if np.any(eta <= 0):
            raise DomainError(f"Burg offsets must be positive, got {eta}")
        self.eta = eta

    def divergence(self, x, xp):
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        return float(np.sum(g1kl((x + self.eta) / (xp + self.eta))))

    def symmetric_divergence(self, x, xp):
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        d = x - xp
        return float(np.sum(d * d / ((x + self.eta) * (xp + self.eta))))


def generator_from_kind(kind, constraint_set=REALS, **params):
    if kind in ("quadratic", "l2"):
        return QuadraticGenerator(params["gamma"], constraint_set)
    elif kind in ("smoothed_kl", "kl"):
        return SmoothedKLGenerator(params["gamma"], params["c"], params["xi"], NONNEG)
    else:
        raise ValueError(f"Unknown generator kind: {kind}")


def solve_alpha(gen, lambda0):
    return gen.threshold(lambda0)


def generator_calculus(gen, x):
    return gen.calculus(x)


def bregman_scalar(gen, x, xp):
    return float(gen.divergence(x, xp))
