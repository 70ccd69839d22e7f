"""Exception types raised across the package."""


class QuditError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(QuditError, ValueError):
    pass


class OutOfRegimeError(QuditError, ValueError):
    """Parameters fall outside the validity regime of an approximation."""


class SingularityError(QuditError, ValueError):
    pass


class UndefinedAngleError(QuditError, ValueError):
    pass


class DegeneratePairError(QuditError, ValueError):
    pass


class UnsupportedMultichromaticError(QuditError, ValueError):
    """Tones with different carrier frequencies cannot share one rotating frame."""


class StepSizeError(QuditError, ValueError):
    pass


class NoResonanceError(QuditError, RuntimeError):
    pass


class DiabaticTrackingError(QuditError, RuntimeError):
    pass


class PoorFitError(QuditError, RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SearchExhaustedError(QuditError, RuntimeError):
    def __init__(self, message, frontier_size=0):
        super().__init__(message)
        self.frontier_size = frontier_size


class NotSynthesizableError(QuditError, ValueError):
    pass


class NonInformationallyCompleteError(QuditError, ValueError):
    pass


class AmbiguousPurificationError(QuditError, ValueError):
    pass


class UndefinedFidelityError(QuditError, ValueError):
    pass


class UnfittableError(QuditError, RuntimeError):
    pass


class ConfigError(QuditError, ValueError):
    pass
