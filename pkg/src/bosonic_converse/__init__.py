"""Bosonic channel simulation and strong converse bounds for thermal and additive noise."""

__version__ = "0.1.0"

from .errors import (
    DimensionMismatchError,
    InfeasibleSmoothingError,
    InvalidArgumentError,
    MissingDeltaError,
    ToleranceError,
    TruncationError,
)
