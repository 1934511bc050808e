"""Truncated single-mode Fock-space primitives.

States are stored on the span of ``|0>, ..., |D-1>``. Whatever probability
mass a state places outside that span is kept as an explicit ``leakage``
figure instead of being silently renormalised away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import DimensionMismatchError, InvalidArgumentError

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-9
DIST_TOL = 1e-12


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


def log_binom(n, k):
    """Natural log of the binomial coefficient via log-gamma (broadcasts)."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


@dataclass(frozen=True)
class FockVector:
    """Pure state amplitudes on a truncated Fock space."""

    amps: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amps = _frozen(self.amps, complex)
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidArgumentError("amplitudes must be a non-empty 1-D array")
        norm2 = float(np.vdot(amps, amps).real)
        if norm2 > 1.0 + DIST_TOL:
            raise InvalidArgumentError(f"squared norm {norm2} exceeds one")
        if self.leakage < -DIST_TOL:
            raise InvalidArgumentError("leakage must be nonnegative")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self):
        return self.amps.size

    def to_density_matrix(self):
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), leakage=self.leakage)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, trace-at-most-one matrix plus its truncation leakage.

    Hermiticity and ``trace + leakage == 1`` are enforced on construction;
    positivity is checked by :meth:`validate` because it needs a full
    eigendecomposition.
    """

    matrix: np.ndarray
    leakage: float = 0.0
    info: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise InvalidArgumentError("density matrix must be square and non-empty")
        scale = max(1.0, float(np.max(np.abs(mat))))
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL * scale:
            raise InvalidArgumentError("density matrix is not Hermitian")
        if self.leakage < -TRACE_TOL:
            raise InvalidArgumentError(f"negative leakage {self.leakage}")
        total = float(np.trace(mat).real) + self.leakage
        if abs(total - 1.0) > TRACE_TOL:
            raise InvalidArgumentError(f"trace + leakage = {total}, expected 1")
        object.__setattr__(self, "matrix", _frozen(0.5 * (mat + mat.conj().T), complex))
        object.__setattr__(self, "leakage", max(0.0, float(self.leakage)))

    @classmethod
    def from_matrix(cls, mat, **info):
        """Wrap a subnormalised matrix, booking the missing trace as leakage."""
        mat = np.asarray(mat, dtype=complex)
        return cls(mat, leakage=max(0.0, 1.0 - float(np.trace(mat).real)), info=info)

    @classmethod
    def diagonal_state(cls, probs):
        probs = np.asarray(probs, dtype=float)
        return cls.from_matrix(np.diag(probs))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.matrix).real)

    def diagonal(self):
        return np.clip(np.diag(self.matrix).real, 0.0, None)

    def photon_distribution(self):
        return PhotonDistribution.from_probs(self.diagonal())

    def mean_photons(self):
        return float(np.dot(np.arange(self.dim), np.diag(self.matrix).real))

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def embed(self, dim):
        """Zero-pad (or refuse to shrink) to a larger truncation."""
        if dim < self.dim:
            raise InvalidArgumentError("embed only grows the truncation")
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.matrix
        return DensityMatrix(out, leakage=self.leakage, info=dict(self.info))

    def validate(self, psd_tol=PSD_TOL):
        lo = float(self.eigenvalues()[0])
        if lo < -psd_tol:
            raise InvalidArgumentError(f"density matrix has eigenvalue {lo}")
        return self


@dataclass(frozen=True)
class PhotonDistribution:
    """Photon-number law on ``0..D-1`` with the remaining mass in ``tail``."""

    probs: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        probs = _frozen(self.probs, float)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidArgumentError("probabilities must be a non-empty 1-D array")
        if np.any(probs < 0.0) or self.tail < 0.0:
            raise InvalidArgumentError("probabilities must be nonnegative")
        total = float(probs.sum()) + self.tail
        if abs(total - 1.0) > DIST_TOL:
            raise InvalidArgumentError(f"probabilities plus tail sum to {total}")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail", float(self.tail))

    @classmethod
    def from_probs(cls, probs):
        probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
        return cls(probs, tail=max(0.0, 1.0 - float(probs.sum())))

    @property
    def dim(self):
        return self.probs.size

    def mean(self):
        return float(np.dot(np.arange(self.dim), self.probs))

    def second_moment(self):
        l = np.arange(self.dim, dtype=float)
        return float(np.dot(l * l, self.probs))

    def variance(self):
        mu = self.mean()
        return self.second_moment() - mu * mu

    def to_density_matrix(self):
        return DensityMatrix(np.diag(self.probs).astype(complex), leakage=self.tail)


@dataclass(frozen=True)
class CutoffProjector:
    """Projector onto ``modes``-mode number states with total photons at most ``limit``."""

    modes: int
    limit: int

    def __post_init__(self):
        if self.modes < 1 or self.limit < 0:
            raise InvalidArgumentError("need modes >= 1 and limit >= 0")

    @property
    def rank(self):
        return projector_rank(self.modes, self.limit)

    def diagonal(self, dim):
        """0/1 diagonal of the projector on the ``dim**modes`` product space."""
        grids = np.indices((dim,) * self.modes).reshape(self.modes, -1)
        return (grids.sum(axis=0) <= self.limit).astype(float)


def annihilation(dim):
    """Truncated lowering operator ``a`` with ``a|k> = sqrt(k)|k-1>``."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def number_state(k, dim):
    if not 0 <= k < dim:
        raise InvalidArgumentError(f"photon number {k} outside truncation {dim}")
    vec = np.zeros(dim, dtype=complex)
    vec[k] = 1.0
    return FockVector(vec)


def coherent_state(alpha, dim):
    """Coherent state ``|alpha>`` truncated to ``dim`` levels.

    Amplitudes are assembled as ``exp(log|c_k|) * exp(i k arg(alpha))`` so that
    large photon numbers neither overflow nor lose precision to factorials.
    """
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvalidArgumentError("alpha must be finite")
    if dim < 1:
        raise InvalidArgumentError("dim must be positive")
    k = np.arange(dim)
    r = abs(alpha)
    if r == 0.0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return FockVector(amps, leakage=0.0)
    log_mag = -0.5 * r * r + k * math.log(r) - 0.5 * gammaln(k + 1.0)
    amps = np.exp(log_mag) * np.exp(1j * k * np.angle(alpha))
    kept = float(np.sum(np.exp(2.0 * log_mag)))
    return FockVector(amps, leakage=max(0.0, 1.0 - kept))


def thermal_state(mean_photons, dim):
    """Geometric (Bose-Einstein) state with the given mean photon number."""
    n = float(mean_photons)
    if not n >= 0.0:
        raise InvalidArgumentError("mean photon number must be nonnegative")
    if dim < 1:
        raise InvalidArgumentError("dim must be positive")
    l = np.arange(dim)
    if n == 0.0:
        probs = (l == 0).astype(float)
        leakage = 0.0
    else:
        log_ratio = math.log(n) - math.log1p(n)
        probs = np.exp(l * log_ratio - math.log1p(n))
        leakage = math.exp(dim * log_ratio)
    return DensityMatrix(np.diag(probs).astype(complex), leakage=leakage)


def displacement_operator(alpha, dim):
    """``exp(alpha a^dag - alpha^* a)`` of the truncated generator.

    The truncated generator is anti-Hermitian, so the result is exactly unitary
    on the truncated space; it agrees with the true displacement only on the
    low-photon corner. Use a ``dim`` several times the photon numbers you care
    about and check with :func:`unitary_defect`.
    """
    if dim < 2:
        raise InvalidArgumentError("dim must be at least 2")
    alpha = complex(alpha)
    a = annihilation(dim)
    return expm(alpha * a.T - alpha.conjugate() * a)


def unitary_defect(unitary, keep):
    """Spectral norm of ``(U^dag U - I)`` restricted to the index set ``keep``."""
    u = np.asarray(unitary)
    keep = np.asarray(keep)
    if keep.dtype == bool:
        keep = np.flatnonzero(keep)
    gram = (u.conj().T @ u)[np.ix_(keep, keep)]
    return float(np.linalg.norm(gram - np.eye(keep.size), ord=2))


def _as_matrix(state):
    if isinstance(state, DensityMatrix):
        return state.matrix
    return np.asarray(state, dtype=complex)


def trace_norm(mat):
    """Schatten-1 norm of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(_as_matrix(mat)))))


def trace_distance(rho, sigma):
    """Half the trace norm of ``rho - sigma``."""
    a, b = _as_matrix(rho), _as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} differ")
    return 0.5 * trace_norm(a - b)


def infinity_norm(rho):
    """Largest eigenvalue of a positive semidefinite matrix."""
    return float(np.linalg.eigvalsh(_as_matrix(rho))[-1])


def _psd_sqrt(mat):
    w, v = np.linalg.eigh(mat)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def gentle_measurement_defect(rho, lam):
    """Trace-norm disturbance ``||rho - sqrt(L) rho sqrt(L)||_1``.

    Args:
        rho: state (``DensityMatrix`` or array).
        lam: measurement operator with ``0 <= lam <= I``.

    Raises:
        InvalidArgumentError: if ``lam`` has eigenvalues outside ``[0, 1]``
            beyond a 1e-10 slack.
    """
    r = _as_matrix(rho)
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != r.shape:
        raise DimensionMismatchError("operator and state shapes differ")
    w = np.linalg.eigvalsh(0.5 * (lam + lam.conj().T))
    if w[0] < -PSD_TOL or w[-1] > 1.0 + PSD_TOL:
        raise InvalidArgumentError("measurement operator must satisfy 0 <= lam <= I")
    root = _psd_sqrt(0.5 * (lam + lam.conj().T))
    return trace_norm(r - root @ r @ root)


def projector_rank(modes, limit):
    """Number of ``modes``-tuples of nonnegative integers with sum at most ``limit``.

    Exact integer arithmetic, i.e. ``C(limit + modes, modes)``.
    """
    if modes < 1 or limit < 0:
        raise InvalidArgumentError("need modes >= 1 and limit >= 0")
    return math.comb(int(limit) + int(modes), int(modes))


def random_density_matrix(dim, rng, rank=None):
    """Ginibre-distributed density matrix of the given rank (full by default)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)
