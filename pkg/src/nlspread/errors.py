"""Exception hierarchy shared by every module of the package."""


class NLSpreadError(Exception):
    """Base class for all package errors."""


class DomainError(NLSpreadError, ValueError):
    """An argument lies outside the domain of the operation."""


class MGFOverflow(NLSpreadError, ArithmeticError):
    """The exponent inside a moment-generating function exceeds the safe range."""


class BracketFailure(NLSpreadError):
    """No sign change was found inside the admissible search range."""


class TailMassTooLarge(NLSpreadError):
    pass


class ZeroNegativeMass(NLSpreadError):
    pass


class InternalInconsistency(NLSpreadError):
    """Two independent computations that must agree did not."""


class NoCriticalValue(NLSpreadError):
    """The asymmetry index is <= 1, so no critical mobility exists."""


class UnprovenError(NLSpreadError):
    """The requested computation relies on an unproven generalization."""


class HypothesisViolation(NLSpreadError, ValueError):
    """Model parameters or kernels violate a structural hypothesis."""


class GridMismatch(NLSpreadError, ValueError):
    pass


class BoxViolation(NLSpreadError):
    """A field left the invariant box [0, 1]."""


class BoundaryContamination(NLSpreadError):
    """The solution reached the outer cells of the truncated domain."""


class InsufficientSamples(NLSpreadError):
    pass


class InitialDominationFailure(NLSpreadError):
    pass


class ConfigMismatch(NLSpreadError, ValueError):
    pass


class ConfigError(NLSpreadError, ValueError):
    """A scenario file could not be parsed into valid objects."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
