"""
Lower restricted isometry constant by support enumeration.
"""
import itertools
import logging
import math

import numpy as np
from scipy.linalg import eigvalsh

from pybrex.exceptions import GuardViolation

logger = logging.getLogger(__name__)

MAX_K = 20
MAX_SUPPORTS = 2_000_000


def gram_min_eigenvalue(A, omega):
    A_omega = A[:, list(omega)]
    return float(eigvalsh(A_omega.T @ A_omega, subset_by_index=[0, 0])[0])


def lrip_delta(A, K):
    """
    delta_K^- = 1 - min over #omega <= K of lambda_min(A_omega^T A_omega).

    Only supports of size exactly min(K, N) are enumerated: by eigenvalue
    interlacing a smaller Gram matrix never has a smaller least eigenvalue.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    N = A.shape[1]
    K = int(K)
    if K < 1:
        raise GuardViolation(f"LRIP order must be at least 1, got K={K}")
    if K > min(N, MAX_K):
        raise GuardViolation(f"lrip_delta needs K <= min(N, {MAX_K}), got K={K} with N={N}")
    k = min(K, N)
    count = math.comb(N, k)
    if count > MAX_SUPPORTS:
        raise GuardViolation(f"lrip_delta would enumerate {count} supports (limit {MAX_SUPPORTS})")
    worst = math.inf
    worst_support = None
    for omega in itertools.combinations(range(N), k):
        lam = gram_min_eigenvalue(A, omega)
        if lam < worst:
            worst, worst_support = lam, omega
    delta = 1.0 - max(worst, 0.0)
    logger.debug(f"lrip_delta(K={K}) = {delta:.12g} attained on {worst_support}")
    return delta
