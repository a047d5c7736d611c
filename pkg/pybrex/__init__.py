from .exceptions import (
    BrexError,
    DomainError,
    GuardViolation,
    SupportNotIdentifiable,
    NumericalFailure,
    CertificateUnavailable,
    ConfigError,
    TheoryViolation,
)
from .relaxation import (
    QuadraticGenerator,
    SmoothedKLGenerator,
    BrexPenalty,
    LeastSquaresFidelity,
    KullbackLeiblerFidelity,
    Problem,
)
from .solvers import prox_gradient, brute_force_l0, oracle_solve

__version__ = "0.1.0"

__all__ = [
    "BrexError",
    "DomainError",
    "GuardViolation",
    "SupportNotIdentifiable",
    "NumericalFailure",
    "CertificateUnavailable",
    "ConfigError",
    "TheoryViolation",
    "QuadraticGenerator",
    "SmoothedKLGenerator",
    "BrexPenalty",
    "LeastSquaresFidelity",
    "KullbackLeiblerFidelity",
    "Problem",
    "prox_gradient",
    "brute_force_l0",
    "oracle_solve",
]
