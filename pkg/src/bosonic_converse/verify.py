"""Randomized and exhaustive verification suites.

Each suite returns a :class:`SuiteResult` holding one row per check, a
``passed`` flag per row and the tolerance that was applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import symplectic
from .converse.bounds import rank_bound_check
from .converse.experiments import qubit_converse_check
from .entropy import smooth_min_entropy, smoothing_cap, verify_renyi_smoothing
from .fock import gentle_measurement_defect, random_density_matrix, trace_norm


@dataclass(frozen=True)
class SuiteResult:
    name: str
    columns: tuple
    rows: list
    tolerance: float

    @property
    def failures(self):
        return sum(1 for row in self.rows if not row[-1])

    @property
    def passed(self):
        return self.failures == 0

    @property
    def max_residual(self):
        idx = self.columns.index("residual")
        return max((row[idx] for row in self.rows), default=0.0)


def _rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


DECOMP_ETAS = tuple(np.linspace(0.1, 0.9, 9))
DECOMP_NBS = (0.1, 1.0, 10.0)
DECOMP_NBARS = (0.1, 1.0, 10.0)


def decompositions_suite(tol=1e-14):
    """Loss/amplifier/additive factorizations of the thermal and additive channels."""
    rows = []
    for eta in DECOMP_ETAS:
        for n_b in DECOMP_NBS:
            target = symplectic.make_thermal(eta, n_b)
            for name, built in (
                ("thermal=amplifier.loss", symplectic.thermal_via_amplifier(eta, n_b)),
                ("thermal=additive.loss", symplectic.thermal_via_additive(eta, n_b)),
            ):
                res = symplectic.distance(built, target)
                rows.append((name, float(eta), n_b, math.nan, res, res <= tol))
    for n_bar in DECOMP_NBARS:
        res = symplectic.distance(symplectic.additive_via_amplifier(n_bar), symplectic.make_additive(n_bar))
        rows.append(("additive=amplifier.loss", math.nan, math.nan, n_bar, res, res <= tol))
    return SuiteResult(
        "decompositions", ("identity", "eta", "n_b", "n_bar", "residual", "passed"), rows, tol
    )


def random_smoothing_instance(rng):
    """Random distribution, Renyi order and feasible smoothing radius.

    Returns ``None`` when the drawn distribution admits no positive radius.
    """
    size = int(rng.integers(2, 60))
    conc = float(rng.choice([0.1, 0.5, 1.0, 5.0]))
    dist = rng.dirichlet(np.full(size, conc))
    dist = dist / dist.sum()
    cap = smoothing_cap(dist)
    if cap <= 0.0:
        return None
    alpha = float(rng.choice([2.0, 3.0, float(rng.uniform(1.05, 12.0))]))
    eps = float(cap * rng.uniform(1e-3, 1.0))
    return dist, alpha, eps


def smoothing_suite(instances=10_000, seed=0, tol=1e-12):
    """Smoothing inequality and achieved-distance checks on random instances."""
    rows = []
    index = 0
    while len(rows) < instances:
        inst = random_smoothing_instance(_rng(seed, index))
        index += 1
        if inst is None:
            continue
        dist, alpha, eps = inst
        check = verify_renyi_smoothing(dist, alpha, eps)
        dist_err = abs(smooth_min_entropy(dist, eps).achieved_distance - eps)
        ok = check.holds and dist_err <= tol
        rows.append((len(rows), dist.size, alpha, eps, check.lhs, check.rhs, dist_err, ok))
    return SuiteResult(
        "smoothing",
        ("index", "size", "alpha", "epsilon", "lhs", "rhs", "residual", "passed"),
        rows,
        tol,
    )


def _random_effect(dim, rng):
    """Random operator with ``0 <= L <= I``."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(g)
    w = rng.beta(0.3, 0.3, size=dim)
    w[rng.integers(dim)] = 1.0
    return (q * w) @ q.conj().T


def gentle_suite(instances=500, seed=0, tol=1e-10):
    """Gentle-measurement bound and the effect-difference inequality.

    Checks ``||rho - sqrt(L) rho sqrt(L)||_1 <= 2 sqrt(1 - Tr L rho)`` and
    ``Tr L sigma <= Tr L rho + ||rho - sigma||_1``.
    """
    rows = []
    for i in range(instances):
        rng = _rng(seed, i)
        dim = int(rng.integers(2, 9))
        rho = random_density_matrix(dim, rng, rank=int(rng.integers(1, dim + 1))).matrix
        sigma = random_density_matrix(dim, rng).matrix
        lam = _random_effect(dim, rng)
        p_rho = float(np.real(np.trace(lam @ rho)))
        defect = gentle_measurement_defect(rho, lam)
        gentle_bound = 2.0 * math.sqrt(max(0.0, 1.0 - p_rho))
        gap1 = defect - gentle_bound
        p_sigma = float(np.real(np.trace(lam @ sigma)))
        gap2 = p_sigma - p_rho - trace_norm(rho - sigma)
        residual = max(gap1, gap2)
        rows.append((i, dim, p_rho, defect, gentle_bound, gap2, residual, residual <= tol))
    return SuiteResult(
        "gentle",
        ("index", "dim", "tr_lam_rho", "defect", "gentle_bound", "ineq_gap", "residual", "passed"),
        rows,
        tol,
    )


def rank_suite(n_max=200, densities=(0.5, 1.0, 5.0)):
    rows = []
    for n_s in densities:
        for n in range(1, n_max + 1):
            rep = rank_bound_check(n, n_s)
            rows.append((n, n_s, rep.limit, rep.exact_log2_rank, rep.bound,
                         rep.exact_log2_rank - rep.bound, rep.holds))
    return SuiteResult(
        "rank", ("n", "n_s", "limit", "log2_rank", "bound", "residual", "passed"), rows, 0.0
    )


def qubit_suite(instances=1000, n_max=8, rates=(1.5, 2.0), seed=0):
    """Split ``instances`` randomized checks over ``n <= n_max`` and ``rates``."""
    cells = [(n, r) for n in range(1, n_max + 1) for r in rates]
    base, extra = divmod(instances, len(cells))
    rows = []
    for i, (n, rate) in enumerate(cells):
        trials = base + (1 if i < extra else 0)
        rep = qubit_converse_check(n, rate, trials, seed=seed * 1000 + i)
        residual = rep.max_success - rep.bound
        rows.append((n, rate, rep.messages, trials, rep.max_success, rep.bound, residual, rep.holds))
    return SuiteResult(
        "qubit",
        ("n", "rate", "messages", "trials", "max_success", "bound", "residual", "passed"),
        rows,
        1e-12,
    )


SUITES = {
    "decompositions": decompositions_suite,
    "smoothing": smoothing_suite,
    "gentle": gentle_suite,
    "rank": rank_suite,
    "qubit": qubit_suite,
}
