"""
The B-rex penalty beta_psi, its Clarke subdifferentials and scalar prox.

For a generator psi with threshold alpha (d_psi(0, alpha) = lambda0):

    beta(x) = psi(0) - psi(x) + sign(x) psi'(alpha) x   if |x| <= alpha
            = lambda0                                     otherwise
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from pybrex.exceptions import NumericalFailure
from pybrex.relaxation.generators import NONNEG, REALS

logger = logging.getLogger(__name__)

_TIE_TOL = 1e-14


@dataclass(frozen=True)
class SubgradInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty subgradient interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, s):
        s = float(s)
        return cls(s, s)

    def shift(self, s):
        return SubgradInterval(self.lo + s, self.hi + s)

    def contains(self, s, tol=0.0):
        return self.lo - tol <= s <= self.hi + tol

    def distance(self, s):
        if s < self.lo:
            return self.lo - s
        if s > self.hi:
            return s - self.hi
        return 0.0

    @property
    def is_point(self):
        return self.lo == self.hi


class BrexPenalty:
    """beta_psi for one coordinate, with the threshold solved once at construction."""

    def __init__(self, generator, lambda0):
        self.generator = generator
        self.threshold = generator.threshold(lambda0)
        self.lambda0 = self.threshold.lambda0
        self.alpha = self.threshold.alpha
        self._psi0 = float(generator._value(0.0))

    @property
    def constraint_set(self):
        return self.generator.constraint_set

    def value(self, x):
        self.generator.check(x)
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        inner = np.minimum(a, self.alpha)
        # evaluated on |x| with psi' odd; beyond alpha the clipped closed form equals lambda0
        closed = self._psi0 - self.generator._value(np.copysign(inner, x)) + self.threshold.slope_alpha * inner
        out = np.where(a > self.alpha, self.lambda0, np.clip(closed, 0.0, self.lambda0))
        return float(out) if out.ndim == 0 else out

    def subdiff(self, x):
        self.generator.check(x)
        x = float(x)
        th = self.threshold
        if x == 0.0:
            lo = -math.inf if self.constraint_set == NONNEG else -th.slope_alpha - th.slope_zero
            return SubgradInterval(lo, th.slope_alpha - th.slope_zero)
        if abs(x) <= self.alpha:
            return SubgradInterval.point(-float(self.generator._first(x)) + math.copysign(th.slope_alpha, x))
        return SubgradInterval.point(0.0)

    def h_subdiff(self, x):
        """Subdifferential of h = beta + psi, the convex envelope piece."""
        self.generator.check(x)
        x = float(x)
        th = self.threshold
        if x == 0.0:
            lo = -math.inf if self.constraint_set == NONNEG else -th.slope_alpha
            return SubgradInterval(lo, th.slope_alpha)
        if abs(x) <= self.alpha:
            return SubgradInterval.point(math.copysign(th.slope_alpha, x))
        return SubgradInterval.point(float(self.generator._first(x)))

    def prox(self, step, v):
        """
        Global minimizer over the constraint set of beta(x) + (x - v)^2 / (2 step).

        Ties between candidates are broken toward the smaller |x|.
        """
        if step <= 0:
            raise ValueError(f"prox step must be positive, got {step}")
        v = float(v)
        if self.constraint_set == REALS and v < 0:
            return -self._prox_halfline(step, -v)
        return self._prox_halfline(step, v)

    def _prox_halfline(self, step, v):
        if v <= 0.0:
            return 0.0
        alpha = self.alpha
        gen = self.generator
        slope_alpha = self.threshold.slope_alpha

        def objective(x):
            return float(self.value(x)) + (x - v) ** 2 / (2.0 * step)

        candidates = [0.0, alpha]
        if v > alpha:
            candidates.append(v)
        else:
            lo = gen.curvature_crossing(step)
            if lo < alpha:
                def dobj(x):
                    return -float(gen._first(x)) + slope_alpha + (x - v) / step

                if dobj(lo) < 0.0 < dobj(alpha):
                    try:
                        candidates.append(brentq(dobj, lo, alpha, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
                    except (RuntimeError, ValueError) as e:
                        raise NumericalFailure("prox stationary point not bracketed",
                                               {"generator": repr(gen), "step": step, "v": v, "interval": (lo, alpha)}) from e
        values = [objective(c) for c in candidates]
        best = min(values)
        scale = _TIE_TOL * max(1.0, abs(best))
        return min((c for c, val in zip(candidates, values) if val <= best + scale), key=abs)

    def __repr__(self):
        return f"BrexPenalty({self.generator!r}, lambda0={self.lambda0}, alpha={self.alpha})"


def brex_scalar(gen, lambda0, x):
    return BrexPenalty(gen, lambda0).value(x)


def brex_subdiff(gen, lambda0, x):
    return BrexPenalty(gen, lambda0).subdiff(x)


def h_subdiff(gen, lambda0, x):
    return BrexPenalty(gen, lambda0).h_subdiff(x)


def brex_prox_scalar(gen, lambda0, step, v):
    return BrexPenalty(gen, lambda0).prox(step, v)


def brex_vector(penalties, x):
    return np.array([p.value(xi) for p, xi in zip(penalties, np.asarray(x, dtype=float))])


def prox_brex(penalties, step, v):
    return np.array([p.prox(step, vi) for p, vi in zip(penalties, np.asarray(v, dtype=float))])
