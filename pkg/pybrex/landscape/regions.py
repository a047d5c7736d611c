"""
Safe oracle regions: computable sets guaranteed to contain the oracle solution.

With a BRSC constant C_K against D_Psi, the oracle solution lies in
{u : D_Psi(u*, u) <= F(x*) / C_K}. For a quadratic generator this is a
Euclidean ball around u*; for smoothed KL generators it is a sublevel set of
a sum of g1 terms, bounded coordinate-wise through the sublevel interval of g1.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import svdvals
from scipy.optimize import brentq

from pybrex.exceptions import CertificateUnavailable, DomainError
from pybrex.relaxation.generators import g1kl

logger = logging.getLogger(__name__)

BALL = "ball"
KL_SUBLEVEL = "kl_sublevel"


@dataclass(frozen=True)
class SafeRegion:
    kind: str
    center: np.ndarray
    radius: Optional[float] = None
    gamma: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None
    xi: Optional[float] = None
    budget: Optional[float] = None

    def contains(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == BALL:
            return bool(np.linalg.norm(u - self.center) <= self.radius * (1.0 + 1e-12) + 1e-15)
        return kl_region_membership(u, self.center, (self.gamma, self.c, self.xi), self.budget)

    def contains_rows(self, U):
        """Membership of every row of U."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if self.kind == BALL:
            return np.linalg.norm(U - self.center, axis=1) <= self.radius * (1.0 + 1e-12) + 1e-15
        inside = np.all(U >= 0, axis=1)
        ratio = (self.c * self.center + self.xi) / (self.c * np.maximum(U, 0.0) + self.xi)
        total = np.sum(self.gamma * g1kl(ratio), axis=1)
        return inside & (total <= self.budget * (1.0 + 1e-12))

    def box(self):
        """Per-coordinate [lo, hi] bounds of the region."""
        if self.kind == BALL:
            return self.center - self.radius, self.center + self.radius
        return kl_region_box(self)


def safe_ball(u_star, F_star, gamma, C_K):
    if C_K <= 0:
        raise CertificateUnavailable("no safe region: the BRSC constant is zero")
    if F_star < 0:
        raise DomainError(f"F(x*) must be nonnegative, got {F_star}")
    radius = math.sqrt(2.0 * F_star / (gamma * C_K))
    return SafeRegion(kind=BALL, center=np.asarray(u_star, dtype=float), radius=radius)


def kl_region(u_star, gamma, c, xi, F_star, C_K):
    if C_K <= 0:
        raise CertificateUnavailable("no safe region: the BRSC constant is zero")
    u_star = np.asarray(u_star, dtype=float)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), u_star.shape).copy()
    c = np.broadcast_to(np.asarray(c, dtype=float), u_star.shape).copy()
    return SafeRegion(kind=KL_SUBLEVEL, center=u_star, gamma=gamma, c=c, xi=float(xi), budget=F_star / (xi * C_K))


def kl_region_membership(u, u_star, params, budget):
    gamma, c, xi = params
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        return False
    ratio = (c * np.asarray(u_star, dtype=float) + xi) / (c * u + xi)
    total = float(np.sum(gamma * g1kl(ratio)))
    return total <= budget * (1.0 + 1e-12)


def g1kl_sublevel_upper(height):
    """Largest t >= 1 with t - log t - 1 <= height."""
    if height < 0:
        raise DomainError(f"sublevel height must be nonnegative, got {height}")
    if height == 0:
        return 1.0
    hi = 2.0
    while g1kl(hi) <= height:
        hi *= 2.0
    return brentq(lambda t: g1kl(t) - height, 1.0, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)


def g1kl_sublevel_lower(height):
    """Smallest t in (0, 1] with t - log t - 1 <= height (0.0 once it underflows)."""
    if height < 0:
        raise DomainError(f"sublevel height must be nonnegative, got {height}")
    if height == 0:
        return 1.0
    lo = 0.5
    while g1kl(lo) <= height:
        lo *= 0.5
        if lo < 1e-300:
            return 0.0
    return brentq(lambda t: g1kl(t) - height, lo, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps)


def kl_region_box(region):
    """Bounding box of a KL sublevel region from the per-coordinate sublevel interval of g1."""
    lo = np.empty_like(region.center)
    hi = np.empty_like(region.center)
    for j, (us, g, c) in enumerate(zip(region.center, region.gamma, region.c)):
        level = region.budget / g
        anchor = c * us + region.xi
        e, E = g1kl_sublevel_lower(level), g1kl_sublevel_upper(level)
        lo[j] = max((anchor / E - region.xi) / c, 0.0)
        hi[j] = (anchor / e - region.xi) / c if e > 0 else math.inf
    return lo, hi


def derive_box_bound(p):
    """
    Q with {x in C^N : F(x) <= F(0)} inside [-Q, Q]^N (or [0, Q]^N).

    Every global minimizer of J0 satisfies F(x) <= J0(x) <= J0(0) = F(0).
    """
    F0 = p.F(np.zeros(p.N))
    if p.fidelity.kind == "ls":
        s = svdvals(p.A)
        if s.size < p.N or s.min() <= 1e-12 * max(s.max(), 1.0):
            raise CertificateUnavailable("no box bound: A is not injective")
        return 2.0 * float(np.linalg.norm(p.fidelity.y)) / float(s.min())
    y, b = p.fidelity.y, p.fidelity.b
    # each KL term is nonnegative, so every row obeys g_j(a_j x) <= F(0)
    Z = np.array([F0 if yj == 0 else yj * g1kl_sublevel_upper(F0 / yj) for yj in y])
    bounds = []
    for i in range(p.N):
        col = p.A[:, i]
        rows = col > 0
        if not np.any(rows):
            raise CertificateUnavailable(f"no box bound: column {i} is zero")
        bounds.append(float(np.min((Z[rows] - b[rows]) / col[rows])))
    Q = max(bounds)
    logger.debug(f"derived box bound Q={Q:.6g} from F(0)={F0:.6g}")
    return Q
