"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """A parameter is outside the domain an operation accepts."""


class DimensionMismatchError(ValueError):
    """Two operands live on truncated spaces of different dimension."""


class TruncationError(ValueError):
    """A Fock-space cutoff is too small for the requested accuracy.

    Attributes:
        required_dim: smallest dimension estimated to meet the accuracy target,
            or ``None`` when no estimate is available.
    """

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class ToleranceError(ArithmeticError):
    """A numerical procedure could not certify its own tolerance."""


class InfeasibleSmoothingError(ValueError):
    """The smoothing radius is too large for the waterfilling construction.

    Attributes:
        cap: largest smoothing radius of the feasible interval starting at zero.
    """

    def __init__(self, message, cap):
        super().__init__(message)
        self.cap = cap


class MissingDeltaError(KeyError):
    """A tabulated slack schedule has no entry for the requested block length."""
