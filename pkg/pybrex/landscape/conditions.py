"""
Direct evaluation of the oracle-recovery conditions for a given lambda0.

Condition identifiers used in reports:

    lambda_threshold    lambda0 > F(x*) / (1 + K - 2k*)
    off_support         ||a_i|| sqrt(2 L~ F(x*)) <= psi_i'(alpha_i) - psi_i'(0) off the support (C_K > 1)
    off_support_strict  ||a_i|| sqrt(2 L~ F(x*)) < C_K (psi_i'(alpha_i) - psi_i'(0)) off the support (C_K <= 1)
    on_support_alpha    the safe region avoids {u : some |u_j| <= alpha_j}
    on_support_rho      the safe region avoids {u : some psi_j'(|u_j|) <= rho_j},
                        rho_j = (psi_j'(alpha_j) - psi_j'(0)) / C_K + psi_j'(0)
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import qmc

from pybrex.exceptions import CertificateUnavailable
from pybrex.landscape.regions import BALL, g1kl_sublevel_upper, kl_region, safe_ball
from pybrex.relaxation.generators import QuadraticGenerator, SmoothedKLGenerator
from pybrex.relaxation.problem import as_support
from pybrex.solvers.restricted import oracle_solve

logger = logging.getLogger(__name__)

LAMBDA_THRESHOLD = "lambda_threshold"
OFF_SUPPORT = "off_support"
OFF_SUPPORT_STRICT = "off_support_strict"
ON_SUPPORT_ALPHA = "on_support_alpha"
ON_SUPPORT_RHO = "on_support_rho"

DEFAULT_FALSIFICATION_SAMPLES = 2 ** 17


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    margin: float
    certified: bool = True
    detail: str = ""


@dataclass
class ConditionReport:
    verdict: bool
    lambda0: float
    C_K: float
    conditions: dict = field(default_factory=dict)
    oracle: Optional[object] = None
    region: Optional[object] = None
    oracle_in_region: Optional[bool] = None
    falsification: dict = field(default_factory=dict)

    def failed(self):
        return [name for name, c in self.conditions.items() if c.certified and not c.passed]


def _region_for(p, sigma_star, u_star, F_star, C_K):
    gens = [p.generators[i] for i in sigma_star]
    if all(isinstance(g, QuadraticGenerator) for g in gens):
        return safe_ball(u_star, F_star, min(g.gamma for g in gens), C_K)
    if all(isinstance(g, SmoothedKLGenerator) for g in gens) and len({g.xi for g in gens}) == 1:
        return kl_region(u_star, [g.gamma for g in gens], [g.c for g in gens], gens[0].xi, F_star, C_K)
    raise CertificateUnavailable("no safe region for a mixture of generator families on the support")


def _forbidden_bounds(p, sigma_star, C_K, use_rho):
    """Per-coordinate t_j such that the forbidden set is {u : some |u_j| <= t_j}."""
    bounds = []
    for i in sigma_star:
        pen = p.penalties[i]
        if not use_rho:
            bounds.append(pen.alpha)
        else:
            th = pen.threshold
            bounds.append(float(pen.generator.derivative_inverse(th.gap / C_K + th.slope_zero)))
    return np.array(bounds)


def _on_support_condition(p, region, sigma_star, C_K, use_rho):
    name = ON_SUPPORT_RHO if use_rho else ON_SUPPORT_ALPHA
    bounds = _forbidden_bounds(p, sigma_star, C_K, use_rho)
    u_star = np.abs(region.center)
    if region.kind == BALL:
        margins = u_star - region.radius - bounds
        return ConditionResult(name, bool(np.all(margins > 0)), float(margins.min()))
    # the sum of g1 terms exceeds the budget as soon as one coordinate sits at or below its bound
    margins = []
    for us, g, c, t in zip(u_star, region.gamma, region.c, bounds):
        if not math.isfinite(t):
            margins.append(-math.inf)
            continue
        E = g1kl_sublevel_upper(region.budget / g)
        margins.append((c * us + region.xi) / (c * t + region.xi) - E)
    margins = np.array(margins)
    return ConditionResult(name, bool(np.all(margins > 0)), float(margins.min()))


def _off_support_condition(p, sigma_star, F_star, C_K, strict):
    off = [i for i in range(p.N) if i not in sigma_star]
    name = OFF_SUPPORT_STRICT if strict else OFF_SUPPORT
    if not off:
        return ConditionResult(name, True, math.inf)
    lhs = p.column_norms[off] * math.sqrt(2.0 * p.lipschitz.L_tilde * F_star)
    gap = (p.slopes_alpha - p.slopes_zero)[off]
    if strict:
        margins = C_K * gap - lhs
        return ConditionResult(name, bool(np.all(margins > 0)), float(margins.min()))
    margins = gap - lhs
    return ConditionResult(name, bool(np.all(margins >= 0)), float(margins.min()))


def falsify_region(p, region, sigma_star, C_K, use_rho, n_samples=DEFAULT_FALSIFICATION_SAMPLES, seed=0):
    """
    Sobol points of the region's bounding box that lie in the region and in the
    forbidden set. A nonzero count contradicts the on-support condition.
    """
    lo, hi = region.box()
    lo = np.maximum(lo, 0.0) if p.constraint_set == "nonneg" else lo
    hi = np.where(np.isfinite(hi), hi, 10.0 * np.abs(region.center) + 1.0)
    if np.all(hi > lo):
        sampler = qmc.Sobol(d=len(sigma_star), scramble=True, seed=seed)
        m = max(int(math.ceil(math.log2(max(n_samples, 2)))), 1)
        points = qmc.scale(sampler.random_base2(m=m), lo, hi)
    else:
        points = region.center[None, :]
    bounds = _forbidden_bounds(p, sigma_star, C_K, use_rho)
    inside = points[region.contains_rows(points)]
    hits = int(np.count_nonzero(np.any(np.abs(inside) <= bounds, axis=1)))
    return {"samples": int(len(points)), "in_region": int(len(inside)), "forbidden_hits": hits}


def _evaluate(p, x_star, sigma_star, certificate, lambda0, with_threshold, falsification_samples, seed):
    if lambda0 is not None and lambda0 != p.lambda0:
        p = p.with_lambda0(lambda0)
    sigma_star = as_support(sigma_star, p.N)
    x_star = p.check(np.asarray(x_star, dtype=float))
    C_K = certificate.generator_constant
    K = certificate.K
    F_star = p.F(x_star)
    report = ConditionReport(verdict=False, lambda0=p.lambda0, C_K=C_K)

    if with_threshold:
        if K < 2 * len(sigma_star):
            report.conditions[LAMBDA_THRESHOLD] = ConditionResult(
                LAMBDA_THRESHOLD, False, -math.inf, detail=f"K={K} < 2k*={2 * len(sigma_star)}")
        else:
            margin = p.lambda0 - F_star / (1 + K - 2 * len(sigma_star))
            report.conditions[LAMBDA_THRESHOLD] = ConditionResult(LAMBDA_THRESHOLD, margin > 0, margin)
        use_rho = C_K <= 1
    else:
        use_rho = False
    off = _off_support_condition(p, sigma_star, F_star, C_K, strict=use_rho)
    report.conditions[off.name] = off

    if C_K <= 0:
        report.conditions[ON_SUPPORT_ALPHA] = ConditionResult(
            ON_SUPPORT_ALPHA, False, -math.inf, detail="no safe region: the BRSC constant is zero")
        logger.info(f"lambda0={p.lambda0}: not certified (C_K = 0)")
        return report

    u_star = x_star[list(sigma_star)]
    region = _region_for(p, sigma_star, u_star, F_star, C_K)
    report.region = region
    on = _on_support_condition(p, region, sigma_star, C_K, use_rho)
    report.conditions[on.name] = on

    oracle = oracle_solve(p, sigma_star, x_star)
    report.oracle = oracle
    report.oracle_in_region = region.contains(oracle.u_or)
    if not report.oracle_in_region:
        logger.warning(f"oracle solution outside the safe region at C_K={C_K:.6g}; the BRSC constant may be invalid")

    if region.kind != BALL and falsification_samples:
        report.falsification = falsify_region(p, region, sigma_star, C_K, use_rho, falsification_samples, seed)
        if on.passed and report.falsification["forbidden_hits"]:
            logger.warning(f"sampling found {report.falsification['forbidden_hits']} forbidden points in a certified region")

    report.verdict = all(c.passed for c in report.conditions.values() if c.certified)
    logger.info(f"lambda0={p.lambda0:.6g}: verdict={report.verdict}, failed={report.failed()}")
    return report


def global_minimizer_check(p, x_star, sigma_star, certificate, lambda0=None,
                           falsification_samples=DEFAULT_FALSIFICATION_SAMPLES, seed=0):
    """
    Whether the oracle solution is the unique global minimizer of J_Psi (and J0)
    and is isolated in sparsity, checked condition by condition.
    """
    return _evaluate(p, x_star, sigma_star, certificate, lambda0, True, falsification_samples, seed)


def local_minimizer_check(p, x_star, sigma_star, certificate, lambda0=None,
                          falsification_samples=DEFAULT_FALSIFICATION_SAMPLES, seed=0):
    """Whether the oracle solution is a strict local minimizer of J_Psi (on_support_alpha and off_support)."""
    return _evaluate(p, x_star, sigma_star, certificate, lambda0, False, falsification_samples, seed)
