"""
Ranges of lambda0 for which the oracle solution is the unique global minimizer
of J_Psi (and J0) and is isolated in sparsity.

Every routine returns a LambdaInterval (lower, upper); the interval is empty
when lower >= upper. Upper bounds whose base goes negative are clamped so the
interval reports empty instead of wrapping around.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from pybrex.exceptions import CertificateUnavailable, DomainError
from pybrex.landscape.regions import g1kl_sublevel_upper
from pybrex.relaxation.problem import as_support

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LambdaInterval:
    lower: float
    upper: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def nonempty(self):
        return bool(self.lower < self.upper)

    def contains(self, lambda0):
        return bool(self.lower < lambda0 < self.upper)

    def interior_points(self, n):
        """n equispaced values strictly inside (lower, upper)."""
        if not self.nonempty:
            raise DomainError(f"empty interval ({self.lower}, {self.upper})")
        if not math.isfinite(self.upper):
            raise DomainError("cannot pick equispaced points in an unbounded interval")
        return [self.lower + (self.upper - self.lower) * k / (n + 1) for k in range(1, n + 1)]

    def __repr__(self):
        state = "nonempty" if self.nonempty else "empty"
        return f"LambdaInterval({self.lower:.6g}, {self.upper:.6g}, {state})"


@dataclass(frozen=True)
class KlIntervalWork:
    f_value: float
    m_star: float
    E: dict
    E_prime: dict
    E_dprime: dict
    h: dict
    kappa: dict
    branch: str

    def __post_init__(self):
        if any(v > 0 for v in self.h.values()):
            raise ValueError(f"h must be nonpositive, got {self.h}")


def _check_sparsity(K, k_star):
    if K < 2 * k_star:
        raise DomainError(f"need K >= 2 k* = {2 * k_star}, got K={K}")
    return 1 + K - 2 * k_star


def _min_amplitude(x_star, sigma_star):
    amps = np.abs(np.asarray(x_star, dtype=float)[list(sigma_star)])
    if amps.size == 0:
        raise DomainError("the oracle support is empty")
    return float(amps.min())


def interval_l2(x_star, F_star, A, sigma_star, C_K, K, gamma, L_tilde):
    """Interval for a quadratic generator (gamma/2)||.||^2 with BRSC constant C_K against it."""
    if C_K <= 0:
        raise CertificateUnavailable("no interval: the BRSC constant is zero")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    sigma_star = as_support(sigma_star, A.shape[1])
    denom = _check_sparsity(K, len(sigma_star))
    off = [i for i in range(A.shape[1]) if i not in sigma_star]
    max_off = float(np.max(np.sum(A[:, off] ** 2, axis=0))) if off else 0.0
    shrink = min(C_K * C_K, 1.0)
    off_term = L_tilde / (gamma * shrink) * max_off
    lower = F_star * max(off_term, 1.0 / denom)
    radius = math.sqrt(2.0 * F_star / (gamma * C_K))
    base = max(_min_amplitude(x_star, sigma_star) - radius, 0.0)
    upper = 0.5 * gamma * shrink * base * base
    diagnostics = {"off_support": F_star * off_term, "lambda_threshold": F_star / denom,
                   "radius": radius, "base": base}
    return LambdaInterval(lower, upper, diagnostics)


def interval_ls(x_star, eps_norm, delta, K, k_star, off_support_max_colnorm=None):
    """
    Interval for least squares with the calibrated quadratic generator,
    expressed through the noise level ||eps||_2 and the LRIP constant.
    """
    _check_sparsity(K, k_star)
    if off_support_max_colnorm is not None and off_support_max_colnorm >= 1:
        raise DomainError(f"the least-squares interval needs column norms below 1, got {off_support_max_colnorm}")
    if delta >= 1:
        return LambdaInterval(math.inf, 0.0, {"reason": "LRIP constant is at least 1"})
    x_star = np.asarray(x_star, dtype=float)
    m = float(np.min(np.abs(x_star[x_star != 0])))
    shrink = min((1.0 - delta) ** 2, 1.0)
    lower = eps_norm ** 2 / (2.0 * shrink)
    base = max(m - eps_norm / math.sqrt(1.0 - delta), 0.0)
    upper = 0.5 * shrink * base * base
    return LambdaInterval(lower, upper, {"min_amplitude": m, "base": base, "delta": delta})


def prior_work_interval(eps_norm, delta, min_amp):
    """The earlier least-squares range, kept for side-by-side comparison with interval_ls."""
    if not 0 <= delta < 1:
        raise DomainError(f"delta must lie in [0, 1), got {delta}")
    q = (1.0 - delta) ** 2
    lower = eps_norm ** 2 / (2.0 * q)
    upper = q / (2.0 * (2.0 - delta) ** 2) * min_amp ** 2
    return LambdaInterval(lower, upper, {"delta": delta})


def f_kl(eps_inf, x_amp, A, b, sigma_star):
    """
    Upper bound on F(x*) for the KL data term from the noise level ||eps||_inf
    and the smallest amplitude m(x*).
    """
    if eps_inf < 0 or x_amp < 0:
        raise DomainError(f"need eps_inf >= 0 and x_amp >= 0, got {eps_inf}, {x_amp}")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.broadcast_to(np.asarray(b, dtype=float), (A.shape[0],))
    a = A[:, list(sigma_star)].sum(axis=1)
    base = a * x_amp + b
    return float(np.sum((base + eps_inf) * np.log1p(eps_inf / base) - eps_inf))


def kl_upper_terms(u_star, f_value, xi, c, gamma, C_K):
    """
    Per-coordinate upper bounds for the KL interval. Returns (uppers, work).

    With E the upper end of the g1 sublevel interval at height f / (gamma xi C_K),
    h = C_K (1 - min(1, xi E / (c u* + xi))) - 1 when C_K < 1 and
    h = -xi min(1/xi, E / (c u* + xi)) otherwise; the bound is -gamma xi (log(1 - e^h) + 1).
    """
    E, E_prime, E_dprime, h, kappa, uppers = {}, {}, {}, {}, {}, {}
    branch = "rho" if C_K < 1 else "alpha"
    for j, (us, cj, gj) in enumerate(zip(u_star, c, gamma)):
        E[j] = g1kl_sublevel_upper(f_value / (gj * xi * C_K))
        anchor = cj * us + xi
        if C_K < 1:
            E_prime[j] = xi * E[j] / anchor
            h[j] = C_K * (1.0 - min(1.0, E_prime[j])) - 1.0
        else:
            E_dprime[j] = E[j] / anchor
            h[j] = -xi * min(1.0 / xi, E_dprime[j])
        kappa[j] = -math.log(-math.expm1(h[j])) if h[j] < 0 else math.inf
        uppers[j] = gj * xi * (kappa[j] - 1.0)
    return uppers, dict(E=E, E_prime=E_prime, E_dprime=E_dprime, h=h, kappa=kappa, branch=branch)


def interval_kl(A, b, x_star, sigma_star, eps_inf, xi, c, gamma, C_K, K, L_tilde):
    """
    Interval for the KL data term with smoothed KL generators (xi, c_i, gamma_i)
    and BRSC constant C_K against D_Psi.

    The lower end combines the sparsity threshold f / (1 + K - 2k*) with the
    off-support bound; it is +inf when the noise makes the off-support bound
    infeasible. The upper end is the minimum over the oracle support of
    kl_upper_terms.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    N = A.shape[1]
    c = np.broadcast_to(np.asarray(c, dtype=float), (N,))
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), (N,))
    if xi <= 0 or np.any(c <= 0) or np.any(gamma <= 0):
        raise DomainError(f"invalid KL generator parameters: xi={xi}, min c={c.min()}, min gamma={gamma.min()}")
    if C_K <= 0:
        raise CertificateUnavailable("no interval: the BRSC constant is zero")
    sigma_star = as_support(sigma_star, N)
    denom = _check_sparsity(K, len(sigma_star))
    x_star = np.asarray(x_star, dtype=float)
    m = _min_amplitude(x_star, sigma_star)
    f = f_kl(eps_inf, m, A, b, sigma_star)
    diagnostics = {"f": f, "lambda_threshold": f / denom}
    lower = f / denom
    off = [i for i in range(N) if i not in sigma_star]
    if off:
        norms = np.sqrt(np.sum(A[:, off] ** 2, axis=0))
        arg = 1.0 - norms * math.sqrt(2.0 * L_tilde * f) / (min(C_K, 1.0) * gamma[off] * c[off])
        if np.any(arg <= 0):
            diagnostics["off_support"] = math.inf
            diagnostics["reason"] = "off-support condition infeasible"
            logger.warning("KL interval empty: off-support condition infeasible at this noise level")
            lower = math.inf
        else:
            off_bound = float(np.max(-gamma[off] * xi * np.log(arg)))
            diagnostics["off_support"] = off_bound
            lower = max(lower, off_bound)
    sigma = list(sigma_star)
    uppers, work = kl_upper_terms(x_star[sigma], f, xi, c[sigma], gamma[sigma], C_K)
    # re-key the per-coordinate records by column index
    rekey = {j: i for j, i in enumerate(sigma)}
    work = {k: ({rekey[j]: v for j, v in d.items()} if isinstance(d, dict) else d) for k, d in work.items()}
    diagnostics["work"] = KlIntervalWork(f_value=f, m_star=m, **work)
    upper = min(uppers.values())
    return LambdaInterval(lower, upper, diagnostics)
