"""Phase-insensitive single-mode Gaussian channels as scalar ``(x, y)`` pairs.

A channel acts on a covariance matrix as ``G -> X G X^T + Y`` with ``X = x I``
and ``Y = y I``. Covariances use the vacuum-equals-identity convention, so a
thermal state of mean ``N`` has variance ``2N + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class GaussChannel:
    x: float
    y: float

    def __post_init__(self):
        if self.y < 0.0:
            raise InvalidArgumentError(f"noise term y={self.y} must be nonnegative")

    def apply(self, cov):
        """Evolve a covariance (scalar variance or matrix)."""
        cov = np.asarray(cov, dtype=float)
        if cov.ndim == 0:
            return self.x * self.x * float(cov) + self.y
        return self.x * self.x * cov + self.y * np.eye(cov.shape[0])

    def physicality_margin(self):
        """``y - |1 - x^2|``; nonnegative for a valid quantum channel."""
        return self.y - abs(1.0 - self.x * self.x)

    def is_physical(self, tol=1e-12):
        return self.physicality_margin() >= -tol

    def __matmul__(self, first):
        return compose(self, first)


def make_additive(n_bar):
    if n_bar < 0.0:
        raise InvalidArgumentError("n_bar must be nonnegative")
    return GaussChannel(1.0, 2.0 * n_bar)


def make_loss(eta):
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgumentError(f"transmissivity {eta} outside [0, 1]")
    return GaussChannel(math.sqrt(eta), 1.0 - eta)


def make_thermal(eta, n_b):
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgumentError(f"transmissivity {eta} outside [0, 1]")
    if n_b < 0.0:
        raise InvalidArgumentError("n_b must be nonnegative")
    return GaussChannel(math.sqrt(eta), (1.0 - eta) * (2.0 * n_b + 1.0))


def make_amplifier(gain):
    if gain < 1.0:
        raise InvalidArgumentError("gain must be at least 1")
    return GaussChannel(math.sqrt(gain), gain - 1.0)


def compose(second, first):
    """Channel that applies ``first`` and then ``second``."""
    return GaussChannel(second.x * first.x, second.x * second.x * first.y + second.y)


def distance(a, b):
    """Max-abs difference of the ``(x, y)`` pairs."""
    return max(abs(a.x - b.x), abs(a.y - b.y))


def thermal_via_additive(eta, n_b):
    """Loss ``eta`` followed by additive noise ``(1 - eta) n_b``."""
    return compose(make_additive((1.0 - eta) * n_b), make_loss(eta))


def thermal_via_amplifier(eta, n_b):
    """Loss ``eta / G`` followed by an amplifier of gain ``G = (1 - eta) n_b + 1``."""
    gain = (1.0 - eta) * n_b + 1.0
    return compose(make_amplifier(gain), make_loss(eta / gain))


def additive_via_amplifier(n_bar):
    """Loss ``1 / (n_bar + 1)`` followed by an amplifier of gain ``n_bar + 1``."""
    return compose(make_amplifier(n_bar + 1.0), make_loss(1.0 / (n_bar + 1.0)))


def decomposition_residuals(eta, n_b, n_bar):
    """Residuals of the three structural identities at one parameter point."""
    return {
        "thermal=additive.loss": distance(thermal_via_additive(eta, n_b), make_thermal(eta, n_b)),
        "thermal=amplifier.loss": distance(thermal_via_amplifier(eta, n_b), make_thermal(eta, n_b)),
        "additive=amplifier.loss": distance(additive_via_amplifier(n_bar), make_additive(n_bar)),
    }


def output_noise_photons(channel, input_photons=0.0):
    """Mean photon number after the channel for a thermal input of mean ``input_photons``."""
    return (channel.apply(2.0 * input_photons + 1.0) - 1.0) / 2.0
