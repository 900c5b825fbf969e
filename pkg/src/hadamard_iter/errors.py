"""Exception taxonomy shared by every module."""


class HadamardIterError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HadamardIterError, ValueError):
    """An argument is outside the mathematical domain of an operation
    (mismatched spaces, invalid point, parameter out of range)."""


class UnsupportedOperationError(HadamardIterError):
    """The operation is well posed but not available for this space or
    set kind (e.g. tangent maps on the spider tree)."""


class ConfigError(HadamardIterError, ValueError):
    """Invalid wiring: unknown names, schedule-class mismatches, malformed
    experiment configs."""


class SolverError(HadamardIterError, RuntimeError):
    """An inner solver failed to reach its target accuracy. Carries a short
    residual report in the message."""
