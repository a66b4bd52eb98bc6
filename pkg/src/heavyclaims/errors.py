"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DivergenceError(ValueError):
    """A requested quantity is a divergent integral or moment."""


class DispatchError(ValueError):
    """Regime and model/mixing inputs are incompatible."""


class UnsupportedError(ValueError):
    """The combination of arguments is valid but deliberately not implemented."""


class NumericalError(RuntimeError):
    """Numerical routine failed to reach tolerance.

    Carries the best available estimate and its error bound so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
