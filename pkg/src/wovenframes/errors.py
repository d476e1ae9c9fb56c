"""Exception types raised across the package."""


class WovenError(ValueError):
    """Base class for every error raised by wovenframes."""


class DimensionError(WovenError):
    pass


class DataError(WovenError):
    pass


class ConvergenceError(WovenError, ArithmeticError):
    pass


class SingularityError(WovenError, ArithmeticError):
    """A spectral function was requested below the rank threshold."""

    def __init__(self, message, lambda_min):
        super().__init__(f"{message} (lambda_min={lambda_min!r})")
        self.lambda_min = lambda_min


class NotAFrameError(SingularityError):
    pass


class InvertibilityError(SingularityError):
    pass


class PartitionError(WovenError):
    pass


class CapacityError(WovenError):
    def __init__(self, required, cap):
        super().__init__(
            f"exhaustive enumeration needs {required} partitions, above the cap of "
            f"{cap}; use sampled bounds instead"
        )
        self.required = required
        self.cap = cap


class BundleError(WovenError):
    pass


class SubspaceError(WovenError):
    pass


class EmptyIntersectionError(SubspaceError):
    pass


class InputError(WovenError):
    """Malformed input document."""
