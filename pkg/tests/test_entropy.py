import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosonic_converse.channels import additive_number_dist, thermal_apply, thermal_number_dist
from bosonic_converse.entropy import (
    g,
    min_entropy,
    min_output_renyi_additive,
    min_output_renyi_thermal,
    renyi_entropy,
    smooth_min_entropy,
    smoothing_cap,
    verify_renyi_smoothing,
    von_neumann_entropy,
)
from bosonic_converse.errors import InfeasibleSmoothingError, InvalidArgumentError, TruncationError
from bosonic_converse.fock import DensityMatrix, PhotonDistribution, random_density_matrix

# mpmath reference values (tests/make_oracles.py)
G_ORACLE = [(1.0, 2.0), (0.5, 1.3774437510817343), (1 / 3, 1.0817041659455104), (3.0, 3.2451124978365315)]


@pytest.mark.parametrize("x, expected", G_ORACLE)
def test_g_oracle(x, expected):
    assert g(x) == pytest.approx(expected, rel=1e-15)


def test_g_edge_cases_and_vectorised():
    assert g(0.0) == 0.0
    assert np.allclose(g(np.array([0.0, 1.0])), [0.0, 2.0])
    with pytest.raises(InvalidArgumentError):
        g(-0.1)


def test_g_concave_and_increasing():
    x = np.linspace(1e-3, 50.0, 4000)
    h = 1e-4
    first = (g(x + h) - g(x - h)) / (2 * h)
    second = (g(x + h) - 2 * g(x) + g(x - h)) / h**2
    assert np.all(first > 0.0)
    assert np.all(second < 0.0)


def test_renyi_of_uniform_is_log_size():
    probs = np.full(8, 1 / 8)
    for alpha in (0.5, 2.0, 3.0, math.inf):
        assert renyi_entropy(probs, alpha) == pytest.approx(3.0, abs=1e-14)
    assert von_neumann_entropy(probs) == pytest.approx(3.0)


def test_renyi_two_by_hand():
    probs = np.array([0.5, 0.25, 0.25])
    assert renyi_entropy(probs, 2.0) == pytest.approx(-math.log2(0.375))
    assert min_entropy(probs) == pytest.approx(1.0)


def test_renyi_rejects_order_one_and_heavy_truncation():
    with pytest.raises(InvalidArgumentError):
        renyi_entropy([0.5, 0.5], 1.0)
    with pytest.raises(TruncationError):
        renyi_entropy(PhotonDistribution(np.array([0.5, 0.4]), tail=0.1), 2.0)


def test_density_matrix_entropy_uses_eigenvalues():
    rng = np.random.default_rng(4)
    rho = random_density_matrix(5, rng)
    evals = np.linalg.eigvalsh(rho.matrix)
    assert renyi_entropy(rho, 2.0) == pytest.approx(-math.log2(np.sum(evals**2)), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=20))
def test_renyi_nonincreasing_in_order(weights):
    probs = np.array(weights) / np.sum(weights)
    values = [renyi_entropy(probs, a) for a in (0.3, 0.7, 1.5, 2.0, 3.0, 10.0, math.inf)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_min_output_renyi_formula():
    assert min_output_renyi_thermal(0.5, 1.0, 3) == pytest.approx(0.85021985907054608, rel=1e-14)
    assert min_output_renyi_additive(0.0, 2) == 0.0
    with pytest.raises(InvalidArgumentError):
        min_output_renyi_additive(1.0, 2.5)


@pytest.mark.parametrize("alpha", [2, 3])
def test_vacuum_output_entropy_matches_closed_form(alpha):
    eta, n_b, n_bar = 0.4, 1.5, 0.8
    thermal = thermal_number_dist(0, eta, n_b, 400)
    additive = additive_number_dist(0, n_bar, 400)
    assert renyi_entropy(thermal, alpha) == pytest.approx(min_output_renyi_thermal(eta, n_b, alpha), abs=1e-10)
    assert renyi_entropy(additive, alpha) == pytest.approx(min_output_renyi_additive(n_bar, alpha), abs=1e-10)


def test_renyi_two_of_vacuum_output_is_log_of_variance():
    eta, n_b = 0.3, 2.0
    assert min_output_renyi_thermal(eta, n_b, 2) == pytest.approx(math.log2(1 + 2 * (1 - eta) * n_b), abs=1e-12)


@pytest.mark.parametrize("alpha", [2, 3])
def test_random_inputs_do_not_beat_vacuum_output(alpha):
    eta, n_b, dim = 0.6, 0.7, 6
    floor = min_output_renyi_thermal(eta, n_b, alpha)
    rng = np.random.default_rng(11)
    for _ in range(200):
        rho = random_density_matrix(dim, rng, rank=int(rng.integers(1, dim + 1)))
        out = thermal_apply(rho, eta, n_b, out_dim=40)
        out = DensityMatrix(out.matrix / out.trace)
        assert renyi_entropy(out, alpha) >= floor - 1e-9


def test_smoothing_worked_example():
    res = smooth_min_entropy([0.5, 0.25, 0.25], 0.1)
    assert res.threshold_p == pytest.approx(0.4)
    assert np.allclose(res.smoothed, [0.4, 0.3, 0.3])
    assert res.smooth_min_entropy == pytest.approx(-math.log2(0.4))
    assert res.achieved_distance == pytest.approx(0.1, abs=1e-15)
    assert res.cap == pytest.approx(1 / 6)


def test_smoothing_beyond_cap_raises():
    with pytest.raises(InfeasibleSmoothingError) as info:
        smooth_min_entropy([0.5, 0.25, 0.25], 0.2)
    assert info.value.cap == pytest.approx(1 / 6)
    assert smoothing_cap([0.25] * 4) == 0.0


def test_smoothing_keeps_original_order_and_ties():
    probs = np.array([0.1, 0.3, 0.3, 0.2, 0.1])
    res = smooth_min_entropy(probs, 0.05)
    assert res.threshold_p == pytest.approx(0.275)
    assert np.argmax(res.smoothed) in (1, 2)
    assert res.smoothed[1] == res.smoothed[2]
    assert res.smoothed.sum() == pytest.approx(1.0, abs=1e-15)


def _brute_force_threshold(probs, eps):
    lo, hi = 0.0, float(probs.max())
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(probs - mid, 0.0)) > eps:
            lo = mid
        else:
            hi = mid
    return hi


def test_threshold_matches_bisection():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 200:
        probs = rng.dirichlet(np.ones(int(rng.integers(2, 30))))
        cap = smoothing_cap(probs)
        if cap <= 0.0:
            continue
        eps = cap * rng.uniform(0.01, 1.0)
        res = smooth_min_entropy(probs, eps)
        assert res.threshold_p == pytest.approx(_brute_force_threshold(probs, eps), abs=1e-13)
        assert res.smoothed.max() == pytest.approx(res.threshold_p, rel=1e-12)
        checked += 1


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=25), st.floats(0.0, 1.0))
def test_smooth_min_entropy_monotone_in_epsilon(weights, frac):
    probs = np.array(weights) / np.sum(weights)
    cap = smoothing_cap(probs)
    lo = smooth_min_entropy(probs, 0.5 * frac * cap).smooth_min_entropy
    hi = smooth_min_entropy(probs, frac * cap).smooth_min_entropy
    assert hi >= lo - 1e-12


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.floats(0.001, 1.0), min_size=2, max_size=30),
    st.floats(1.01, 20.0),
    st.floats(0.001, 1.0),
)
def test_smoothing_inequality_property(weights, alpha, frac):
    probs = np.array(weights) / np.sum(weights)
    cap = smoothing_cap(probs)
    if cap <= 0.0:
        return
    check = verify_renyi_smoothing(probs, alpha, frac * cap)
    assert check.holds, check


def test_zero_epsilon_gives_min_entropy():
    probs = np.array([0.6, 0.3, 0.1])
    res = smooth_min_entropy(probs, 0.0)
    assert res.smooth_min_entropy == pytest.approx(min_entropy(probs))
    assert verify_renyi_smoothing(probs, 2.0, 0.0).rhs == -math.inf


def test_smoothing_rejects_unnormalised_input():
    with pytest.raises(InvalidArgumentError):
        smooth_min_entropy([0.5, 0.6], 0.1)
