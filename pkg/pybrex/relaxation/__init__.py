from .lambertw import lambert_w0
from .generators import (
    REALS,
    NONNEG,
    BregmanGenerator,
    QuadraticGenerator,
    SmoothedKLGenerator,
    BurgReference,
    Threshold,
    generator_from_kind,
    solve_alpha,
)
from .penalty import BrexPenalty, SubgradInterval, brex_vector, prox_brex
from .fidelity import (
    Fidelity,
    LeastSquaresFidelity,
    KullbackLeiblerFidelity,
    LipschitzInfo,
    fidelity_from_kind,
    cc_calibrate_quadratic,
    cc_calibrate_kl,
)
from .problem import Problem, zero_pad, restrict, support_of

__all__ = [
    "lambert_w0",
    "REALS",
    "NONNEG",
    "BregmanGenerator",
    "QuadraticGenerator",
    "SmoothedKLGenerator",
    "BurgReference",
    "Threshold",
    "generator_from_kind",
    "solve_alpha",
    "BrexPenalty",
    "SubgradInterval",
    "brex_vector",
    "prox_brex",
    "Fidelity",
    "LeastSquaresFidelity",
    "KullbackLeiblerFidelity",
    "LipschitzInfo",
    "fidelity_from_kind",
    "cc_calibrate_quadratic",
    "cc_calibrate_kl",
    "Problem",
    "zero_pad",
    "restrict",
    "support_of",
]
