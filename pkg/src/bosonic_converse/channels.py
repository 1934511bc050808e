"""Pure-loss, additive-noise and thermal-noise channels on a single mode.

Each channel exists in two forms:

* photon-number conditional laws (``*_number_dist``) evaluated in log space,
  which is all that matters for number-diagonal inputs, and
* maps on truncated density matrices (``thermal_apply``, ``additive_apply``)
  built from the physical dilation (beamsplitter with a thermal environment)
  or from the random-displacement integral.

The two routes share no code, so agreement between them is a genuine check.
The amplifier has no number-basis action here; see :mod:`.symplectic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm
from scipy.special import logsumexp, xlogy

from .errors import InvalidArgumentError, ToleranceError, TruncationError
from .fock import (
    DensityMatrix,
    PhotonDistribution,
    annihilation,
    log_binom,
    thermal_state,
    unitary_defect,
)

ENV_LEAKAGE_TARGET = 1e-8


@dataclass(frozen=True)
class ChannelParams:
    """Parameters of the four phase-insensitive channels.

    Each constructor only reads its own fields: ``eta`` and ``n_b`` for loss and
    thermal noise, ``n_bar`` for additive noise, ``gain`` for the amplifier.
    """

    eta: float = 1.0
    n_b: float = 0.0
    n_bar: float = 0.0
    gain: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise InvalidArgumentError(f"transmissivity {self.eta} outside [0, 1]")
        if self.n_b < 0.0 or self.n_bar < 0.0:
            raise InvalidArgumentError("noise photon numbers must be nonnegative")
        if self.gain < 1.0:
            raise InvalidArgumentError("amplifier gain must be at least 1")

    @property
    def noise_photons(self):
        """Photons added by the thermal channel, ``(1 - eta) N_B``."""
        return (1.0 - self.eta) * self.n_b

    @property
    def amplifier_gain(self):
        """Gain of the amplifier in the loss-then-amplify decomposition."""
        return self.noise_photons + 1.0

    @property
    def inner_transmissivity(self):
        """Transmissivity of the loss stage in the loss-then-amplify decomposition."""
        return self.eta / self.amplifier_gain


def _check_eta(eta):
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgumentError(f"transmissivity {eta} outside [0, 1]")


def _check_photons(x, name):
    if not x >= 0.0:
        raise InvalidArgumentError(f"{name} must be nonnegative, got {x}")


# ---------------------------------------------------------------------------
# Photon-number conditional laws
# ---------------------------------------------------------------------------


def _log_loss(k, eta):
    m = np.arange(k + 1)
    return log_binom(k, m) + xlogy(m, eta) + xlogy(k - m, 1.0 - eta)


CHUNK_ELEMENTS = 1 << 21


def _log_additive(m_values, n_bar, dim):
    """``log lambda_l(m)`` for every ``m`` in ``m_values`` and ``l < dim``."""
    m_values = np.asarray(m_values, dtype=float)
    jmax = int(np.max(m_values)) if m_values.size else 0
    step = max(1, CHUNK_ELEMENTS // (dim * (jmax + 1)))
    if m_values.size > step:
        # bound the (m, l, j) work array
        return np.concatenate(
            [_log_additive(m_values[i : i + step], n_bar, dim) for i in range(0, m_values.size, step)]
        )
    m = m_values[:, None, None]
    l = np.arange(dim, dtype=float)[None, :, None]
    j = np.arange(jmax + 1, dtype=float)[None, None, :]
    valid = (j <= m) & (j <= l)
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = (
            log_binom(np.where(valid, l, j), j)
            + log_binom(np.where(valid, m, j), j)
            + xlogy(m + l - 2.0 * j, n_bar)
            - (m + l + 1.0) * math.log1p(n_bar)
        )
    terms = np.where(valid, terms, -np.inf)
    return logsumexp(terms, axis=2)


def loss_number_dist(k, eta, dim):
    """Binomial thinning of ``|k>`` by a pure-loss channel."""
    _check_eta(eta)
    if not 0 <= k < dim:
        raise InvalidArgumentError(f"input photon number {k} must be below dim {dim}")
    probs = np.zeros(dim)
    probs[: k + 1] = np.exp(_log_loss(k, eta))
    return PhotonDistribution.from_probs(probs)


def additive_number_dist(m, n_bar, dim):
    """Output photon law of the additive-noise channel on ``|m>``."""
    _check_photons(n_bar, "n_bar")
    if m < 0 or dim < 1:
        raise InvalidArgumentError("need m >= 0 and dim >= 1")
    probs = np.exp(_log_additive([m], n_bar, dim)[0])
    return PhotonDistribution.from_probs(probs)


def thermal_number_dist(k, eta, n_b, dim):
    """Output photon law ``p(l|k)`` of the thermal-noise channel on ``|k>``.

    Binomial loss to ``m`` photons followed by additive noise with
    ``(1 - eta) n_b`` photons, summed over ``m`` in log space.
    """
    _check_eta(eta)
    _check_photons(n_b, "n_b")
    if k < 0 or dim < 1:
        raise InvalidArgumentError("need k >= 0 and dim >= 1")
    log_pm = _log_loss(k, eta)
    log_lam = _log_additive(np.arange(k + 1), (1.0 - eta) * n_b, dim)
    probs = np.exp(logsumexp(log_pm[:, None] + log_lam, axis=0))
    return PhotonDistribution.from_probs(probs)


# ---------------------------------------------------------------------------
# Beamsplitter dilation
# ---------------------------------------------------------------------------


def default_env_dim(n_b, target=ENV_LEAKAGE_TARGET):
    """Smallest cutoff at which a thermal state leaks less than ``target``."""
    _check_photons(n_b, "n_b")
    if n_b == 0.0:
        return 1
    return int(math.floor(math.log(target) / (math.log(n_b) - math.log1p(n_b)))) + 1


def _bs_angle(eta):
    return math.acos(math.sqrt(eta))


def beamsplitter_unitary(eta, dim):
    """Two-mode beamsplitter on the ``dim x dim`` product truncation.

    Exponential of ``theta (a^dag b - a b^dag)`` with ``cos(theta) = sqrt(eta)``,
    which sends ``a -> sqrt(eta) a + sqrt(1-eta) b`` and
    ``b -> -sqrt(1-eta) a + sqrt(eta) b`` in the Heisenberg picture. The index of
    ``|i>_a |j>_b`` is ``i * dim + j``. Only blocks of total photon number below
    ``dim`` are complete; see :func:`bs_defect` for the truncation check.
    """
    if not 0.0 < eta <= 1.0:
        raise InvalidArgumentError("beamsplitter transmissivity must lie in (0, 1]")
    if dim < 2:
        raise InvalidArgumentError("dim must be at least 2")
    a1 = annihilation(dim)
    eye = np.eye(dim)
    a, b = np.kron(a1, eye), np.kron(eye, a1)
    gen = a.T @ b - a @ b.T
    return expm(_bs_angle(eta) * gen)


def total_photon_mask(dim, max_total):
    """Boolean mask over the product basis selecting ``i + j <= max_total``."""
    i, j = np.divmod(np.arange(dim * dim), dim)
    return (i + j) <= max_total


def bs_defect(unitary, dim):
    """Unitary defect on the block of total photon number at most ``dim // 2``."""
    return unitary_defect(unitary, total_photon_mask(dim, dim // 2))


@lru_cache(maxsize=32)
def _bs_blocks(eta, n_max):
    """Exact beamsplitter restricted to each fixed-total-photon block.

    Block ``N`` acts on ``|j, N-j>``, ``j = 0..N``, and is complete, so the
    matrix exponential is free of truncation error.
    """
    theta = _bs_angle(eta)
    blocks = []
    for total in range(n_max + 1):
        j = np.arange(total)
        off = np.sqrt((j + 1.0) * (total - j))
        gen = np.diag(off, -1) - np.diag(off, 1)
        block = expm(theta * gen)
        block.flags.writeable = False
        blocks.append(block)
    return tuple(blocks)


def thermal_apply(rho, eta, n_b, env_dim=None, out_dim=None):
    """Send ``rho`` through the thermal-noise channel via its beamsplitter dilation.

    The environment starts in a thermal state truncated at ``env_dim`` levels,
    the joint state is rotated block by block in total photon number, and the
    environment is traced out.

    Args:
        rho: input ``DensityMatrix``.
        eta: transmissivity in ``[0, 1]``.
        n_b: environment mean photon number.
        env_dim: environment cutoff; defaults to :func:`default_env_dim`.
        out_dim: output cutoff; defaults to the input dimension.

    Returns:
        DensityMatrix whose ``leakage`` is the total mass lost to truncation
        (input leakage, environment leakage and output cutoff together).

    Raises:
        TruncationError: if the truncated environment leaks 1e-8 or more.
    """
    _check_eta(eta)
    _check_photons(n_b, "n_b")
    env_dim = default_env_dim(n_b) if env_dim is None else int(env_dim)
    env = thermal_state(n_b, env_dim)
    if env.leakage >= ENV_LEAKAGE_TARGET:
        raise TruncationError(
            f"environment cutoff {env_dim} leaks {env.leakage:.3g}",
            required_dim=default_env_dim(n_b),
        )
    d_in = rho.dim
    d_out = d_in if out_dim is None else int(out_dim)
    n_max = d_in + env_dim - 2
    n_lost = n_max + 1
    if eta == 0.0:
        # swap: output is the environment, input is traced away
        out = np.zeros((d_out, d_out), dtype=complex)
        k = min(d_out, env_dim)
        out[:k, :k] = env.matrix[:k, :k] * rho.trace
    else:
        blocks = _bs_blocks(float(eta), n_max)
        p_env = env.diagonal()
        mat = rho.matrix
        out = np.zeros((d_out, d_out), dtype=complex)
        for k, pk in enumerate(p_env):
            if pk == 0.0:
                continue
            # iso[i, l, j] = <i, l| U |j, k>, nonzero only when i + l = j + k
            iso = np.zeros((d_out, n_lost, d_in), dtype=complex)
            for j in range(d_in):
                total = j + k
                rows = min(total + 1, d_out)
                i = np.arange(rows)
                iso[i, total - i, j] = blocks[total][:rows, j]
            flat = iso.reshape(d_out, n_lost * d_in)
            half = (iso.reshape(d_out * n_lost, d_in) @ mat).reshape(d_out, n_lost * d_in)
            out += pk * (half @ flat.conj().T)
    return DensityMatrix.from_matrix(
        0.5 * (out + out.conj().T),
        env_dim=env_dim,
        env_leakage=env.leakage,
        out_dim=d_out,
    )


def loss_apply(rho, eta, out_dim=None):
    """Pure-loss channel, i.e. :func:`thermal_apply` with a vacuum environment."""
    return thermal_apply(rho, eta, 0.0, env_dim=1, out_dim=out_dim)


# ---------------------------------------------------------------------------
# Random-displacement integral
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureGrid:
    """Per-axis Gauss-Hermite rule for the Gaussian displacement integral.

    Each phase-space axis carries variance ``n_bar / 2``; ``tol`` is the largest
    accepted trace-distance change when the rule is refined to ``2 * order``.
    """

    order: int = 64
    tol: float = 1e-6

    def nodes(self, order=None):
        t, w = np.polynomial.hermite.hermgauss(order or self.order)
        return t, w / math.sqrt(math.pi)

    def radius(self, n_bar):
        t, _ = self.nodes()
        return float(np.max(np.abs(t))) * math.sqrt(n_bar)


@lru_cache(maxsize=8)
def _quadrature_eigs(work_dim):
    # spectrum of a + a^dag; i(a^dag - a) shares it up to the phase diag(i^k)
    mu, vecs = eigh_tridiagonal(np.zeros(work_dim), np.sqrt(np.arange(1.0, work_dim)))
    vecs.flags.writeable = False
    return mu, vecs


def _kernel(mu, t, w, scale):
    diff = mu[:, None] - mu[None, :]
    out = np.zeros_like(diff)
    for ti, wi in zip(t, w):
        out += wi * np.cos(scale * ti * diff)
    return out


def _displacement_noise(mat, n_bar, t, w, work_dim):
    """``sum_ij w_i w_j D(x_i) D(i y_j) rho D(i y_j)^dag D(x_i)^dag``.

    ``D(iy) = exp(iy(a + a^dag))`` and ``D(x) = exp(x(a^dag - a))`` are diagonal in
    the eigenbasis of ``a + a^dag`` (up to ``S = diag(i^k)`` for the latter), so
    each one-axis average is an elementwise product with a quadrature kernel.
    """
    mu, vecs = _quadrature_eigs(work_dim)
    kern = _kernel(mu, t, w, math.sqrt(n_bar))
    phase = 1j ** np.arange(work_dim)
    # imaginary-axis displacements
    inner = vecs.T @ mat @ vecs
    mat = vecs @ (inner * kern) @ vecs.T
    # real-axis displacements, conjugated by S
    rot = vecs * phase[:, None]
    inner = rot.conj().T @ mat @ rot
    return rot @ (inner * kern) @ rot.conj().T


def default_work_dim(dim, n_bar):
    reach = math.sqrt(dim) + 10.0 * math.sqrt(n_bar) + 5.0
    return max(4 * dim, int(math.ceil(reach * reach)))


def additive_apply(rho, n_bar, grid=None, work_dim=None, out_dim=None):
    """Additive Gaussian noise channel via phase-space quadrature.

    Args:
        rho: input ``DensityMatrix``.
        n_bar: variance of the complex displacement (added photon number).
        grid: :class:`QuadratureGrid`; default 64 nodes per axis.
        work_dim: truncation used for the displacement operators.
        out_dim: output cutoff; defaults to the input dimension.

    Returns:
        DensityMatrix with ``info['quadrature_error']`` holding the trace
        distance to the same integral evaluated at twice the order.

    Raises:
        ToleranceError: if the grid reaches less than ``6 sqrt(n_bar)`` or the
            refinement check exceeds ``grid.tol``.
    """
    _check_photons(n_bar, "n_bar")
    grid = QuadratureGrid() if grid is None else grid
    d_in = rho.dim
    d_out = d_in if out_dim is None else int(out_dim)
    if n_bar == 0.0:
        out = np.zeros((d_out, d_out), dtype=complex)
        k = min(d_in, d_out)
        out[:k, :k] = rho.matrix[:k, :k]
        return DensityMatrix.from_matrix(out, quadrature_error=0.0, work_dim=d_in)
    if grid.radius(n_bar) < 6.0 * math.sqrt(n_bar):
        raise ToleranceError(
            f"quadrature order {grid.order} reaches {grid.radius(n_bar):.3g} < 6 sqrt(n_bar)"
        )
    work_dim = default_work_dim(max(d_in, d_out), n_bar) if work_dim is None else int(work_dim)
    if work_dim < max(d_in, d_out):
        raise InvalidArgumentError("work_dim must cover the input and output cutoffs")
    padded = np.zeros((work_dim, work_dim), dtype=complex)
    padded[:d_in, :d_in] = rho.matrix
    t, w = grid.nodes()
    full = _displacement_noise(padded, n_bar, t, w, work_dim)
    t2, w2 = grid.nodes(2 * grid.order)
    fine = _displacement_noise(padded, n_bar, t2, w2, work_dim)
    err = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(full - fine))))
    if err > grid.tol:
        raise ToleranceError(f"quadrature refinement changed the output by {err:.3g}")
    out = full[:d_out, :d_out]
    return DensityMatrix.from_matrix(
        0.5 * (out + out.conj().T), quadrature_error=err, work_dim=work_dim
    )
