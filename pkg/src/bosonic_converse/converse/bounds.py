"""Classical capacity bounds for the thermal and additive-noise channels.

All functions broadcast over numpy arrays and return bits per channel use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..entropy import g
from ..errors import InvalidArgumentError
from ..fock import projector_rank

LOG2E = math.log2(math.e)


def _thermal_args(eta, n_s, n_b):
    eta, n_s, n_b = (np.asarray(v, dtype=float) for v in (eta, n_s, n_b))
    if np.any((eta < 0.0) | (eta > 1.0)):
        raise InvalidArgumentError("transmissivity must lie in [0, 1]")
    if np.any(n_s < 0.0) or np.any(n_b < 0.0):
        raise InvalidArgumentError("photon numbers must be nonnegative")
    return eta, n_s, n_b


def _additive_args(n_s, n_bar):
    n_s, n_bar = np.asarray(n_s, dtype=float), np.asarray(n_bar, dtype=float)
    if np.any(n_s < 0.0) or np.any(n_bar < 0.0):
        raise InvalidArgumentError("photon numbers must be nonnegative")
    return n_s, n_bar


def _out(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def cap_lower_thermal(eta, n_s, n_b):
    """Achievable rate ``g(eta N_S + (1-eta) N_B) - g((1-eta) N_B)``."""
    eta, n_s, n_b = _thermal_args(eta, n_s, n_b)
    noise = (1.0 - eta) * n_b
    return _out(g(eta * n_s + noise) - g(noise))


def cap_lower_additive(n_s, n_bar):
    n_s, n_bar = _additive_args(n_s, n_bar)
    return _out(g(n_s + n_bar) - g(n_bar))


def cap_upper_gio(eta, n_s, n_b):
    """Upper bound ``g(eta N_S + (1-eta) N_B) - log2(1 + 2 (1-eta) N_B)``."""
    eta, n_s, n_b = _thermal_args(eta, n_s, n_b)
    noise = (1.0 - eta) * n_b
    return _out(g(eta * n_s + noise) - np.log2(1.0 + 2.0 * noise))


def cap_upper_gio_additive(n_s, n_bar):
    n_s, n_bar = _additive_args(n_s, n_bar)
    return _out(g(n_s + n_bar) - np.log2(1.0 + 2.0 * n_bar))


def cap_upper_ks(eta, n_s, n_b):
    """Upper bound ``g(eta N_S / ((1-eta) N_B + 1))``."""
    eta, n_s, n_b = _thermal_args(eta, n_s, n_b)
    return _out(g(eta * n_s / ((1.0 - eta) * n_b + 1.0)))


def cap_upper_ks_additive(n_s, n_bar):
    n_s, n_bar = _additive_args(n_s, n_bar)
    return _out(g(n_s / (n_bar + 1.0)))


@dataclass(frozen=True)
class BoundRow:
    lower: float
    upper_gio: float
    upper_ks: float

    @property
    def gap_gio(self):
        return self.upper_gio - self.lower

    @property
    def gap_ks(self):
        return self.upper_ks - self.lower


def thermal_bounds(eta, n_s, n_b):
    return BoundRow(
        cap_lower_thermal(eta, n_s, n_b), cap_upper_gio(eta, n_s, n_b), cap_upper_ks(eta, n_s, n_b)
    )


def additive_bounds(n_s, n_bar):
    return BoundRow(
        cap_lower_additive(n_s, n_bar),
        cap_upper_gio_additive(n_s, n_bar),
        cap_upper_ks_additive(n_s, n_bar),
    )


# ---------------------------------------------------------------------------
# Photon-cutoff rank bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankReport:
    n: int
    n_s: float
    limit: int
    exact_rank: int
    exact_log2_rank: float
    delta_used: float
    bound: float
    holds: bool


def min_rank_delta(n, n_s):
    """Smallest slack ``(log2 e + log2(1 + 1/N_S)) / n`` the rank bound allows."""
    return (LOG2E + math.log2(1.0 + 1.0 / n_s)) / n


def rank_bound_check(n, n_s):
    """Compare ``log2 rank(Pi_L)``, ``L = ceil(n N_S)``, with ``n (g(N_S) + delta)``.

    The rank is the exact integer ``C(L + n, n)``.
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError("n must be a positive integer")
    if not n_s > 0.0:
        raise InvalidArgumentError("N_S must be positive")
    n = int(n)
    # exact ceiling of n * N_S for the given binary float
    limit = math.ceil(Fraction(n_s) * n)
    rank = projector_rank(n, limit)
    log_rank = math.log2(rank)
    delta = min_rank_delta(n, n_s)
    bound = n * (g(n_s) + delta)
    return RankReport(n, float(n_s), limit, rank, log_rank, delta, bound, log_rank <= bound)
