class MJPError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(MJPError, ValueError):
    pass


class StabilityError(MJPError):
    """The drift matrix is not Hurwitz."""


class DefinitenessError(MJPError, ValueError):
    pass


class NumericalError(MJPError):
    """A solve finished but its residual is above tolerance."""


class FactorizationError(MJPError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ScaleError(MJPError):
    """Problem size is beyond what the exact engine is meant to handle."""


class ModelError(MJPError):
    """Invalid process model, e.g. a negative transition rate."""


class AssumptionError(MJPError):
    """A quantity needs an assumption that the process does not satisfy."""


class IrreducibilityError(MJPError):
    def __init__(self, message, classes=None):
        super().__init__(message)
        self.classes = classes or []


class ConvergenceError(MJPError):
    pass


class ConfigError(MJPError, ValueError):
    pass


class DomainError(MJPError, KeyError):
    """A function was needed at a lattice point where it is not defined."""


class TailMassError(MJPError):
    """A truncated support box leaves more probability mass than allowed."""
