class GravKerrError(Exception):
    pass


class InvalidDimensionError(GravKerrError, ValueError):
    pass


class DimensionMismatchError(GravKerrError, ValueError):
    pass


class TruncationError(GravKerrError, ValueError):
    """Requested truncation cannot meet the tail-mass tolerance."""

    def __init__(self, message, required_dim=None, tail_bound=None):
        super().__init__(message)
        self.required_dim = required_dim
        self.tail_bound = tail_bound


class SeriesError(GravKerrError, RuntimeError):
    """Exponential action failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ContractViolation(GravKerrError, ValueError):
    pass


class PreconditionError(GravKerrError, ValueError):
    pass


class SingularMatrixError(GravKerrError, ValueError):
    pass


class AccuracyError(GravKerrError, RuntimeError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnsupportedConfigurationError(GravKerrError, ValueError):
    pass


class IncompleteScenarioError(GravKerrError, ValueError):
    pass
