"""Numerical experiments: photon-count concentration, vacuum-mixed codewords
and the noiseless-qubit converse."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..channels import thermal_apply, thermal_number_dist
from ..errors import InvalidArgumentError, TruncationError
from ..fock import DensityMatrix, coherent_state

TRIAL_BLOCK = 1000
MOMENT_TOL = 1e-6
LEAKAGE_LIMIT = 1e-6


def _block_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


# ---------------------------------------------------------------------------
# Concentration of the output photon count
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConcentrationReport:
    n: int
    trials: int
    threshold: float
    expected_total: float
    empirical_fail_rate: float
    chebyshev_constant: float
    chebyshev_bound: float
    sampling_slack: float
    dim: int
    moment_error: float

    @property
    def holds(self):
        return self.empirical_fail_rate <= self.chebyshev_bound + self.sampling_slack


def _tabulate(values, eta, n_b, dim):
    return {a: thermal_number_dist(a, eta, n_b, dim) for a in values}


def _moment_error(values, eta, n_b, dim):
    """Largest change in the second moment when the cutoff is doubled."""
    small = _tabulate(values, eta, n_b, dim)
    large = _tabulate(values, eta, n_b, 2 * dim)
    return max(abs(large[a].second_moment() - small[a].second_moment()) for a in values), small


def concentration_experiment(a_profile, eta, n_b, delta5, trials, seed=0, n_s=None, dim=None):
    """Monte Carlo estimate of ``Pr[sum_i l_i > n (eta N_S + (1-eta) N_B + delta5)]``.

    Each ``l_i`` is drawn from the thermal-channel law ``p(l | a_i)`` by inverse
    CDF on the tabulated distribution. The Chebyshev bound uses the largest
    per-mode variance: ``C / n`` with ``C = max Var / delta5**2``.

    Args:
        a_profile: input photon numbers ``a_1..a_n``.
        eta, n_b: thermal channel parameters.
        delta5: deviation allowed per mode.
        trials: number of Monte Carlo repetitions (at least 1000).
        seed: base seed; trial block ``b`` uses the stream ``(seed, b)``.
        n_s: photon density in the threshold; defaults to ``sum(a) / n``.
        dim: truncation of the tabulated laws; chosen automatically when omitted.

    Raises:
        TruncationError: if doubling ``dim`` changes a second moment by more
            than 1e-6.
    """
    a = np.asarray(a_profile, dtype=int)
    n = a.size
    if n == 0 or np.any(a < 0):
        raise InvalidArgumentError("a_profile must be a nonempty list of photon numbers")
    if trials < 1000:
        raise InvalidArgumentError("at least 1000 trials are required")
    if not delta5 > 0.0:
        raise InvalidArgumentError("delta5 must be positive")
    n_s = a.sum() / n if n_s is None else float(n_s)
    if a.sum() > math.ceil(n * n_s - 1e-9):
        raise InvalidArgumentError("profile exceeds the photon budget ceil(n N_S)")

    values = sorted(set(a.tolist()))
    if dim is None:
        noise = (1.0 - eta) * n_b
        dim = max(32, int(values[-1] + 40.0 * (noise + 1.0)))
        err, laws = _moment_error(values, eta, n_b, dim)
        while err > MOMENT_TOL:
            dim *= 2
            if dim > 1 << 16:
                raise TruncationError("no cutoff below 65536 meets the moment tolerance")
            err, laws = _moment_error(values, eta, n_b, dim)
    else:
        err, laws = _moment_error(values, eta, n_b, int(dim))
        if err > MOMENT_TOL:
            raise TruncationError(
                f"cutoff {dim} changes second moments by {err:.3g}", required_dim=2 * int(dim)
            )

    cdfs = {v: np.cumsum(laws[v].probs) for v in values}
    expected = float(sum(laws[v].mean() for v in a.tolist()))
    threshold = n * (eta * n_s + (1.0 - eta) * n_b + delta5)
    fails = 0
    for block, start in enumerate(range(0, trials, TRIAL_BLOCK)):
        size = min(TRIAL_BLOCK, trials - start)
        u = _block_rng(seed, block).random((size, n))
        totals = np.zeros(size)
        for v in values:
            cols = a == v
            idx = np.searchsorted(cdfs[v], u[:, cols], side="right")
            totals += np.minimum(idx, dim - 1).sum(axis=1)
        fails += int(np.count_nonzero(totals > threshold))

    rate = fails / trials
    const = max(laws[v].variance() for v in values) / delta5**2
    bound = min(1.0, const / n)
    slack = 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
    return ConcentrationReport(n, trials, threshold, expected, rate, const, bound, slack, dim, err)


# ---------------------------------------------------------------------------
# Mixing codewords with vacuum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CodebookSpec:
    """Coherent-state codebook for the mean-photon-constraint demonstration.

    Args:
        n_modes: block length ``n``.
        mean_amp_sq_P: power ``P`` of each codeword, ``sum |alpha_i|^2 = n P``.
        mix_p: probability ``p`` of replacing a codeword by the vacuum.
        size_M: number of messages.
        n_s: optional mean-photon constraint; when given it must equal
            ``(1 - p) P``.
    """

    n_modes: int
    mean_amp_sq_P: float
    mix_p: float
    size_M: int = 2
    n_s: float = None

    def __post_init__(self):
        if self.n_modes < 1 or self.size_M < 1:
            raise InvalidArgumentError("n_modes and size_M must be positive")
        if self.mean_amp_sq_P < 0.0:
            raise InvalidArgumentError("P must be nonnegative")
        if not 0.0 <= self.mix_p <= 1.0:
            raise InvalidArgumentError("mix_p must lie in [0, 1]")
        if self.n_s is not None and abs((1.0 - self.mix_p) * self.mean_amp_sq_P - self.n_s) > 1e-12:
            raise InvalidArgumentError("(1 - p) P must equal the declared N_S")

    @property
    def mixed_mean_photons(self):
        return (1.0 - self.mix_p) * self.mean_amp_sq_P

    @property
    def purified_mean_photons(self):
        n = self.n_modes
        return (1.0 - self.mix_p) * n * self.mean_amp_sq_P / (n + 1) + self.mix_p / (n + 1)


@dataclass(frozen=True)
class MeanConstraintReport:
    amplitudes: np.ndarray
    reference_success: float
    reference_error: float
    succ_mixed: float
    succ_pure_codeword_bound: float
    inequality_holds: bool
    purified_mean_formula: float
    purified_mean_numeric: float
    leakage: float
    dim: int


def _kron_all(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _channel_output(amps, eta, n_b, dim):
    outs = []
    leak = 0.0
    for alpha in amps:
        vec = coherent_state(alpha, dim)
        out = thermal_apply(vec.to_density_matrix(), eta, n_b)
        leak = max(leak, vec.leakage, out.leakage)
        outs.append(out.matrix)
    return _kron_all(outs), leak


def _purified_mean(amps, p, dim):
    """Mean photon number per mode of ``sqrt(1-p)|alpha>|0> + sqrt(p)|0...0>|1>``."""
    n = len(amps)
    coh = _kron_all([coherent_state(a, dim).amps for a in amps])
    vac = np.zeros(dim**n)
    vac[0] = 1.0
    anc0, anc1 = np.eye(dim)[0], np.eye(dim)[1]
    psi = math.sqrt(1.0 - p) * np.kron(coh, anc0) + math.sqrt(p) * np.kron(vac, anc1)
    probs = np.abs(psi.reshape((dim,) * (n + 1))) ** 2
    total = 0.0
    for axis in range(n + 1):
        shape = [1] * (n + 1)
        shape[axis] = dim
        total += float(np.sum(probs * np.arange(dim).reshape(shape)))
    return total / (n + 1)


def mean_constraint_demo(spec, eta, n_b, dim, seed=0):
    """Helstrom decoding of two coherent codewords, before and after vacuum mixing.

    The two codewords get random complex amplitudes rescaled to total power
    ``n P``. The optimal measurement for the unmixed outputs is reused
    unchanged on the mixed outputs.

    Returns:
        MeanConstraintReport; ``inequality_holds`` compares ``succ_mixed`` with
        ``(1 - p)(1 - eps)`` at 1e-9 slack.

    Raises:
        TruncationError: if any truncated state loses more than 1e-6.
    """
    if spec.size_M != 2:
        raise InvalidArgumentError("only binary codebooks are decoded (size_M = 2)")
    if spec.n_modes > 2:
        raise InvalidArgumentError("the demo supports at most two modes")
    rng = _block_rng(seed, 0)
    n, power, p = spec.n_modes, spec.mean_amp_sq_P, spec.mix_p
    raw = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
    amps = raw * np.sqrt(n * power / np.sum(np.abs(raw) ** 2, axis=1, keepdims=True))

    sigma0, leak0 = _channel_output(amps[0], eta, n_b, dim)
    sigma1, leak1 = _channel_output(amps[1], eta, n_b, dim)
    vacuum, leak_v = _channel_output(np.zeros(n), eta, n_b, dim)
    leakage = max(leak0, leak1, leak_v)
    if leakage > LEAKAGE_LIMIT:
        raise TruncationError(f"cutoff {dim} leaks {leakage:.3g}", required_dim=2 * dim)

    w, v = np.linalg.eigh(0.5 * (sigma0 - sigma1))
    pos = v[:, w > 0.0]
    lam0 = pos @ pos.conj().T
    eye = np.eye(lam0.shape[0])

    def success(s0, s1):
        return 0.5 * float(np.real(np.trace(lam0 @ s0) + np.trace((eye - lam0) @ s1)))

    ref = success(sigma0, sigma1)
    eps = 1.0 - ref
    mixed0 = (1.0 - p) * sigma0 + p * vacuum
    mixed1 = (1.0 - p) * sigma1 + p * vacuum
    succ_mixed = success(mixed0, mixed1)
    lower = (1.0 - p) * (1.0 - eps)
    return MeanConstraintReport(
        amplitudes=amps,
        reference_success=ref,
        reference_error=eps,
        succ_mixed=succ_mixed,
        succ_pure_codeword_bound=lower,
        inequality_holds=succ_mixed >= lower - 1e-9,
        purified_mean_formula=spec.purified_mean_photons,
        purified_mean_numeric=_purified_mean(amps[0], p, dim),
        leakage=leakage,
        dim=dim,
    )


# ---------------------------------------------------------------------------
# Noiseless qubit channel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QubitConverseReport:
    n: int
    rate_R: float
    messages: int
    bound: float
    trials: int
    max_success: float
    violations: int
    kinds: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.violations == 0


def _random_povm(d, k, rng):
    """POVM with ``k`` elements ``V_j V_j^dag``, ``V_j = S^-1/2 G_j``, ``S = sum_j G_j G_j^dag``.

    Each ``G_j`` is a ``d x r`` Gaussian block with ``r = ceil(d / k)``, so ``S``
    has full rank. Returns the stacked factors with shape ``(k, d, r)``.
    """
    r = -(-d // k)
    gmat = rng.standard_normal((d, k * r)) + 1j * rng.standard_normal((d, k * r))
    # S^-1/2 G = U W^dag from the thin SVD G = U s W^dag, which is a co-isometry to rounding
    u, _, wh = np.linalg.svd(gmat, full_matrices=False)
    factors = u @ wh
    return factors.reshape(d, k, r).transpose(1, 0, 2)


def _random_kets(d, count, rng):
    kets = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return kets / np.linalg.norm(kets, axis=1, keepdims=True)


def qubit_converse_check(n, rate_R, trials, seed=0):
    """Randomized check of ``(1/M) sum_m Tr(L_m rho_m) <= 2^(-n(R-1))`` on ``n`` qubits.

    Each instance draws a POVM with ``K <= min(M, 2 d)`` nonzero elements (the
    remaining messages get the zero operator, so their states do not enter the
    sum) and one of three state families: random pure states,
    random mixtures of up to four pure states, or states aligned with the top
    eigenvector of their POVM element (these attain the bound when ``K >= d``).
    """
    if int(n) != n or not 1 <= n <= 10:
        raise InvalidArgumentError("n must be an integer in [1, 10]")
    if rate_R < 0.0:
        raise InvalidArgumentError("rate must be nonnegative")
    d = 2**n
    messages = max(1, math.ceil(2.0 ** (n * rate_R) - 1e-9))
    bound = min(1.0, d / messages)
    max_success, violations = 0.0, 0
    kinds = {"pure": 0, "mixed": 0, "aligned": 0}
    for t in range(trials):
        rng = _block_rng(seed, t)
        k = int(rng.integers(1, min(messages, 2 * d) + 1))
        factors = _random_povm(d, k, rng)
        kind = ("pure", "mixed", "aligned")[t % 3]
        kinds[kind] += 1
        if kind == "aligned":
            # top eigenvector of each element: Tr(L_m rho_m) = ||L_m||
            weights = np.linalg.norm(factors, ord=2, axis=(1, 2)) ** 2
        else:
            rank = 1 if kind == "pure" else int(rng.integers(2, 5))
            mix = rng.dirichlet(np.ones(rank), size=k)
            weights = np.zeros(k)
            for j in range(rank):
                kets = _random_kets(d, k, rng)
                proj = np.einsum("kdr,kd->kr", factors.conj(), kets)
                weights += mix[:, j] * np.sum(np.abs(proj) ** 2, axis=1)
        success = float(weights.sum()) / messages
        max_success = max(max_success, success)
        if success > bound * (1.0 + 1e-12) + 1e-14:
            violations += 1
    return QubitConverseReport(n, float(rate_R), messages, bound, trials, max_success, violations, kinds)
