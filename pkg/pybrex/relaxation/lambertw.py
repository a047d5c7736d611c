import numpy as np
from scipy.special import lambertw as _scipy_lambertw

from pybrex.exceptions import DomainError

BRANCH_POINT = -np.exp(-1.0)
_BRANCH_SLACK = 1e-15


def lambert_w0(x):
    """
    Principal branch of the Lambert W function on the real line.

    Returns w >= -1 with w * exp(w) = x. Accepts a scalar or an array and
    returns the same shape (a float for scalar input).

    The scipy evaluation is polished with Halley steps on w*exp(w) - x.

    :param x: value(s) >= -1/e
    :return: W0(x)
    """
    z = np.asarray(x, dtype=float)
    if np.any(np.isnan(z)) or np.any(z < BRANCH_POINT - _BRANCH_SLACK):
        raise DomainError(f"lambert_w0 defined for x >= -1/e, got min {np.nanmin(z) if z.size else z}")
    z = np.maximum(z, BRANCH_POINT)
    w = np.real(_scipy_lambertw(z, 0))
    at_branch = z <= BRANCH_POINT
    for _ in range(4):
        ew = np.exp(w)
        resid = w * ew - z
        w1 = w + 1.0
        safe = ~at_branch & (np.abs(w1) > 1e-8)
        denom = np.where(safe, ew * w1 - (w + 2.0) * resid / (2.0 * np.where(safe, w1, 1.0)), 1.0)
        step = np.where(safe, resid / denom, 0.0)
        w = w - step
        if np.all(np.abs(step) <= 0.7e-16 * (2.0 + np.abs(w))):
            break
    w = np.where(at_branch, -1.0, np.maximum(w, -1.0))
    if w.ndim == 0:
        return float(w)
    return w
