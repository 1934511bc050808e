"""Thermal entropy function, Renyi entropies and waterfilling smooth min-entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .errors import InfeasibleSmoothingError, InvalidArgumentError, TruncationError
from .fock import DensityMatrix, PhotonDistribution

LN2 = math.log(2.0)
RENORMALISE_LIMIT = 1e-9


def g(x):
    """Entropy in bits of a thermal state with mean photon number ``x``.

    ``g(x) = (x + 1) log2(x + 1) - x log2(x)``, with ``g(0) = 0``. Accepts scalars
    or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(np.isnan(arr)):
        raise InvalidArgumentError("g is defined for nonnegative arguments only")
    out = (xlogy(arr + 1.0, arr + 1.0) - xlogy(arr, arr)) / LN2
    return float(out) if out.ndim == 0 else out


def _spectrum(state):
    """Probability vector of a state, applying the truncation-tail policy."""
    if isinstance(state, PhotonDistribution):
        probs, missing = state.probs, state.tail
    elif isinstance(state, DensityMatrix):
        probs = np.clip(state.eigenvalues(), 0.0, None)
        missing = state.leakage
    else:
        probs = np.clip(np.asarray(state, dtype=float), 0.0, None)
        missing = 1.0 - float(probs.sum())
    if abs(missing) >= RENORMALISE_LIMIT:
        raise TruncationError(
            f"state is missing {missing:.3g} of its mass; enlarge the truncation"
        )
    return probs / probs.sum()


def renyi_entropy(state, alpha):
    """Renyi entropy ``log2(Tr rho^alpha) / (1 - alpha)`` in bits.

    Diagonal inputs (``PhotonDistribution`` or a probability array) use their
    entries, density matrices their eigenvalues. ``alpha = inf`` gives the
    min-entropy. States whose truncation lost 1e-9 or more are refused.
    """
    alpha = float(alpha)
    if alpha <= 0.0 or alpha == 1.0:
        raise InvalidArgumentError("Renyi order must be positive and different from 1")
    probs = _spectrum(state)
    if math.isinf(alpha):
        return -math.log2(float(probs.max()))
    nz = probs[probs > 0.0]
    log_power_sum = float(logsumexp(alpha * np.log(nz)))
    return log_power_sum / ((1.0 - alpha) * LN2)


def von_neumann_entropy(state):
    probs = _spectrum(state)
    return float(-np.sum(xlogy(probs, probs)) / LN2)


def min_entropy(state):
    return renyi_entropy(state, math.inf)


def _check_integer_order(alpha):
    if int(alpha) != alpha or alpha < 2:
        raise InvalidArgumentError("minimum-output formulas hold for integer orders >= 2")


def _vacuum_output_renyi(noise, alpha):
    # log2((N+1)^a - N^a) / (a - 1), written to stay finite for large N
    if noise == 0.0:
        return 0.0
    ratio = noise / (noise + 1.0)
    log_val = alpha * math.log1p(noise) + math.log1p(-(ratio**alpha))
    return log_val / ((alpha - 1.0) * LN2)


def min_output_renyi_additive(n_bar, alpha):
    """Renyi entropy of the additive-noise output for vacuum input."""
    _check_integer_order(alpha)
    if n_bar < 0.0:
        raise InvalidArgumentError("n_bar must be nonnegative")
    return _vacuum_output_renyi(float(n_bar), float(alpha))


def min_output_renyi_thermal(eta, n_b, alpha):
    """Renyi entropy of the thermal-noise output for vacuum input."""
    _check_integer_order(alpha)
    if not 0.0 <= eta <= 1.0 or n_b < 0.0:
        raise InvalidArgumentError("need eta in [0, 1] and n_b >= 0")
    return _vacuum_output_renyi((1.0 - eta) * n_b, float(alpha))


# ---------------------------------------------------------------------------
# Smooth min-entropy by waterfilling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmoothingResult:
    threshold_p: float
    smoothed: np.ndarray
    achieved_distance: float
    smooth_min_entropy: float
    cap: float


@dataclass(frozen=True)
class SmoothingCheck:
    lhs: float
    rhs: float
    holds: bool

    @property
    def margin(self):
        return self.lhs - self.rhs


def _as_distribution(dist):
    if isinstance(dist, (PhotonDistribution, DensityMatrix)):
        return _spectrum(dist)
    probs = np.asarray(dist, dtype=float)
    if probs.ndim != 1 or probs.size == 0 or np.any(probs < 0.0):
        raise InvalidArgumentError("expected a nonnegative probability vector")
    if abs(probs.sum() - 1.0) > 1e-12:
        raise InvalidArgumentError(f"distribution sums to {probs.sum()}")
    return probs


def _threshold(sorted_probs, prefix, epsilon):
    """Level ``p`` with ``sum(max(s - p, 0)) == epsilon``; returns ``(p, k)``.

    ``k`` is the number of leading entries strictly carrying excess.
    """
    n = sorted_probs.size
    nxt = np.append(sorted_probs[1:], 0.0)
    ks = np.arange(1, n + 1)
    excess_at_next = prefix - ks * nxt
    k = int(np.searchsorted(excess_at_next, epsilon, side="left")) + 1
    k = min(k, n)
    return (prefix[k - 1] - epsilon) / k, k


def smoothing_cap(dist):
    """End of the feasible smoothing interval that starts at zero.

    Below the cap, redistributing the excess keeps every entry outside the
    top set at or below the threshold, so the smoothed maximum is the threshold.
    """
    s = np.sort(_as_distribution(dist))[::-1]
    top = int(np.sum(s == s[0]))
    if top == s.size or s[top] == 0.0:
        return 0.0
    head = float(s[:top].sum())
    rest = 1.0 - head
    nxt = float(s[top])
    return (head / top - nxt) / (nxt / rest + 1.0 / top)


def smooth_min_entropy(dist, epsilon):
    """Waterfilling smoothing of a distribution to radius ``epsilon``.

    Entries above a threshold ``p`` are cut down to ``p``; the removed mass
    ``epsilon`` is spread over the remaining support in proportion to the
    existing probabilities. The result is ``epsilon``-close in total variation
    and has maximum ``p``, certifying ``H_min^eps >= -log2 p``.

    Raises:
        InfeasibleSmoothingError: if the rescaled remainder would exceed ``p``.
    """
    probs = _as_distribution(dist)
    epsilon = float(epsilon)
    if not 0.0 <= epsilon < 1.0:
        raise InvalidArgumentError("epsilon must lie in [0, 1)")
    cap = smoothing_cap(probs)
    if epsilon == 0.0:
        pmax = float(probs.max())
        return SmoothingResult(pmax, probs.copy(), 0.0, -math.log2(pmax), cap)

    order = np.argsort(-probs, kind="stable")
    s = probs[order]
    prefix = np.cumsum(s)
    p, k = _threshold(s, prefix, epsilon)
    in_top = s >= p
    rest = float(s[~in_top].sum())
    if rest <= 0.0:
        raise InfeasibleSmoothingError(
            f"epsilon={epsilon} leaves no support to absorb the excess (cap {cap:.6g})", cap
        )
    scale = 1.0 + epsilon / rest
    q_sorted = np.where(in_top, p, s * scale)
    if np.max(q_sorted[~in_top]) > p * (1.0 + 1e-12):
        raise InfeasibleSmoothingError(
            f"epsilon={epsilon} pushes the remainder above the threshold (cap {cap:.6g})", cap
        )
    q = np.empty_like(q_sorted)
    q[order] = q_sorted
    achieved = 0.5 * float(np.abs(probs - q).sum())
    return SmoothingResult(float(p), q, achieved, -math.log2(p), cap)


def verify_renyi_smoothing(dist, alpha, epsilon):
    """Compare ``H_min^eps`` with ``H_alpha - log2(1/eps) / (alpha - 1)``."""
    if alpha <= 1.0:
        raise InvalidArgumentError("the smoothing inequality needs alpha > 1")
    lhs = smooth_min_entropy(dist, epsilon).smooth_min_entropy
    h_alpha = renyi_entropy(_as_distribution(dist), alpha)
    rhs = -math.inf if epsilon == 0.0 else h_alpha - math.log2(1.0 / epsilon) / (alpha - 1.0)
    return SmoothingCheck(lhs, rhs, lhs >= rhs)
