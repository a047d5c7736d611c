"""
Bregman restricted strong convexity (BRSC) constants.

A data term F satisfies BRSC at order K over X with respect to a reference
Phi when D_F^symm(x, x') >= C_K D_Phi^symm(x, x') for every x, x' in X with
||x - x'||_0 <= K. Three routes produce a constant:

    LS_LRIP          nu (1 - delta_K^-) / gamma for least squares and quadratic Psi
    KL_CONSTRUCTIVE  a certified lower bound for the KL data term against the Burg entropy
    EMPIRICAL_UPPER  the smallest sampled ratio, an upper bound on the best constant
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import norm as matrix_norm

from pybrex.exceptions import CertificateUnavailable, DomainError
from pybrex.landscape.lrip import lrip_delta
from pybrex.relaxation.generators import NONNEG, BurgReference
from pybrex.relaxation.problem import as_support, zero_pad

logger = logging.getLogger(__name__)

LS_LRIP = "LS_LRIP"
KL_CONSTRUCTIVE = "KL_CONSTRUCTIVE"
EMPIRICAL_UPPER = "EMPIRICAL_UPPER"
PROVENANCES = (LS_LRIP, KL_CONSTRUCTIVE, EMPIRICAL_UPPER)


@dataclass(frozen=True)
class BrscCertificate:
    K: int
    C_K: float
    provenance: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"Unknown BRSC provenance: {self.provenance}")
        if not self.C_K >= 0:
            raise DomainError(f"BRSC constant must be nonnegative, got {self.C_K}")

    @property
    def certified(self):
        return self.provenance != EMPIRICAL_UPPER

    @property
    def generator_constant(self):
        """The constant against D_Psi: C_tilde for the KL route, C_K otherwise."""
        return self.details.get("C_tilde", self.C_K)


class QuadraticReference:
    """Phi = (gamma/2) ||x||^2."""

    def __init__(self, gamma=1.0):
        self.gamma = float(gamma)

    def divergence(self, x, xp):
        d = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
        return 0.5 * self.gamma * float(d @ d)

    def symmetric_divergence(self, x, xp):
        d = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
        return self.gamma * float(d @ d)


class GeneratorReference:
    """Phi = Psi, the separable sum of the B-rex generators of a problem."""

    def __init__(self, generators):
        self.generators = list(generators)

    def divergence(self, x, xp):
        return float(sum(g.divergence(a, b) for g, a, b in zip(self.generators, x, xp)))

    def symmetric_divergence(self, x, xp):
        return float(sum(g.symmetric_divergence(a, b) for g, a, b in zip(self.generators, x, xp)))

    def restrict(self, omega):
        return GeneratorReference([self.generators[i] for i in omega])


def burg_generator(eta):
    return BurgReference(eta)


class SparsePairSampler:
    """
    Pairs (x, x') of the box X = [lo, hi]^N with ||x - x'||_0 <= K.

    x is uniform on X; x' copies x and redraws K coordinates chosen at random.
    """

    def __init__(self, N, K, rng, hi, lo=None, constraint_set=NONNEG):
        self.N = int(N)
        self.K = min(int(K), self.N)
        self.rng = rng
        self.hi = float(hi)
        self.lo = (0.0 if constraint_set == NONNEG else -self.hi) if lo is None else float(lo)
        if not self.lo < self.hi:
            raise DomainError(f"empty sampling box [{self.lo}, {self.hi}]")

    def __call__(self):
        x = self.rng.uniform(self.lo, self.hi, self.N)
        xp = x.copy()
        idx = self.rng.choice(self.N, size=self.K, replace=False)
        xp[idx] = self.rng.uniform(self.lo, self.hi, self.K)
        return x, xp


def brsc_ls(A, K, nu=1.0, gamma=1.0, delta=None):
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    delta = lrip_delta(A, K) if delta is None else float(delta)
    C_K = 0.0 if delta >= 1.0 else nu * (1.0 - delta) / gamma
    logger.info(f"LS BRSC certificate: K={K}, delta={delta:.6g}, C_K={C_K:.6g}")
    return BrscCertificate(K=int(K), C_K=C_K, provenance=LS_LRIP, details={"delta": delta, "nu": nu, "gamma": gamma})


def brsc_kl_constructive(A, y, b, eta, K, Q, xi=None, gamma=None):
    """
    Certified BRSC constant of the KL data term against the Burg entropy with
    offsets eta on X = [0, Q]^N. When the KL generator parameters (xi, gamma)
    are given, the constant against D_Psi, C_K / (xi max_i gamma_i), is
    stored as details["C_tilde"].
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    b = np.broadcast_to(np.asarray(b, dtype=float), y.shape)
    eta = np.broadcast_to(np.asarray(eta, dtype=float), (A.shape[1],))
    if np.any(A < 0):
        raise DomainError("the constructive KL bound needs an entrywise nonnegative matrix")
    if Q <= 0 or np.any(eta <= 0):
        raise DomainError(f"need Q > 0 and eta > 0, got Q={Q}, min eta={eta.min()}")
    observed = y > 0
    if not np.any(observed):
        raise CertificateUnavailable("certificate unavailable: every measurement is zero")
    A_obs = A[observed]
    K = int(K)
    delta = lrip_delta(A_obs, K)
    top = float(np.linalg.norm(A_obs @ np.full(A.shape[1], float(Q)) + b[observed]))
    d1 = float(y[observed].min()) / top
    d2 = top
    d3 = 1.0 / float(eta.min())
    d4 = float(eta.min())
    d5 = 9.0 * K * Q * Q / d4
    B = 4.0 * math.sqrt(K) * Q
    norm_A = float(matrix_norm(A_obs, 2))
    denom = norm_A * B + d2
    Gamma = min(d4 / denom, (3.0 / 16.0) * B * B / (denom * (math.sqrt(K) * B + d5)))
    C_K = 0.0 if delta >= 1.0 else d1 * (1.0 - delta) / d3 * Gamma
    details = {"delta": delta, "delta1": d1, "delta2": d2, "delta3": d3, "delta4": d4, "delta5": d5,
               "B": B, "Q": float(Q), "eta": eta.copy(), "norm_A": norm_A}
    if xi is not None and gamma is not None:
        details["C_tilde"] = C_K / (float(xi) * float(np.max(gamma)))
    logger.info(f"KL BRSC certificate: K={K}, delta={delta:.6g}, C_K={C_K:.6g}, "
                f"C_tilde={details.get('C_tilde', float('nan')):.6g}")
    return BrscCertificate(K=K, C_K=C_K, provenance=KL_CONSTRUCTIVE, details=details)


def brsc_empirical(F_symm, Phi_symm, sampler, n_samples, K=None):
    """Smallest ratio D_F^symm / D_Phi^symm over n_samples sampled pairs."""
    best, best_pair, used = math.inf, None, 0
    for _ in range(int(n_samples)):
        x, xp = sampler()
        phi = Phi_symm(x, xp)
        if phi <= 0:
            continue
        ratio = F_symm(x, xp) / phi
        used += 1
        if ratio < best:
            best, best_pair = ratio, (x, xp)
    if used == 0:
        raise CertificateUnavailable("no sampled pair had a positive reference divergence")
    K = getattr(sampler, "K", K)
    return BrscCertificate(K=int(K or 0), C_K=max(best, 0.0), provenance=EMPIRICAL_UPPER,
                           details={"n_samples": int(n_samples), "n_used": used, "argmin": best_pair})


def fidelity_symmetric(p):
    def F_symm(x, xp):
        return p.fidelity.symmetric_divergence(p.A, x, xp)
    return F_symm


def restricted_convexity_gap(p, omega, u, up, C_K, phi):
    """
    F_w(u) - F_w(u') - <grad F_w(u'), u - u'> - C_K D_Phi_w(u, u').

    phi is a divergence (u, u') -> float on vectors indexed by omega.
    """
    omega = as_support(omega, p.N)
    x = zero_pad(omega, u, p.N)
    xp = zero_pad(omega, up, p.N)
    grad = p.grad_F(xp)[list(omega)]
    d = np.asarray(u, dtype=float) - np.asarray(up, dtype=float)
    return p.F(x) - p.F(xp) - float(grad @ d) - C_K * phi(np.asarray(u, dtype=float), np.asarray(up, dtype=float))
