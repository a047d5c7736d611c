class BrexError(Exception):
    """Base class for every error raised by pybrex."""


class DomainError(BrexError, ValueError):
    """An argument lies outside the constraint set or the fidelity domain."""


class GuardViolation(BrexError, ValueError):
    """An enumeration would exceed the desk-scale guards."""


class SupportNotIdentifiable(BrexError):
    def __init__(self, support, sigma_ratio=None):
        self.support = tuple(support)
        self.sigma_ratio = sigma_ratio
        super().__init__(f"support not identifiable: {self.support} (sigma_min/sigma_max={sigma_ratio})")


class NumericalFailure(BrexError, ArithmeticError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class CertificateUnavailable(BrexError):
    pass


class ConfigError(BrexError, ValueError):
    pass


class TheoryViolation(BrexError):
    """A certified lambda0 whose brute-force optimum is not the oracle support."""

    def __init__(self, message, lambda0=None, expected=None, found=None):
        super().__init__(message)
        self.lambda0 = lambda0
        self.expected = expected
        self.found = found
