import numpy as np
import pytest

from bosonic_converse.errors import InvalidArgumentError
from bosonic_converse.symplectic import (
    GaussChannel,
    additive_via_amplifier,
    compose,
    decomposition_residuals,
    distance,
    make_additive,
    make_amplifier,
    make_loss,
    make_thermal,
    output_noise_photons,
    thermal_via_additive,
    thermal_via_amplifier,
)


def test_constructors():
    assert make_additive(0.5) == GaussChannel(1.0, 1.0)
    assert make_loss(0.25) == GaussChannel(0.5, 0.75)
    assert make_thermal(0.25, 1.0) == GaussChannel(0.5, 2.25)
    assert make_amplifier(4.0) == GaussChannel(2.0, 3.0)


@pytest.mark.parametrize("bad", [lambda: make_loss(1.2), lambda: make_amplifier(0.5),
                                 lambda: make_additive(-1.0), lambda: make_thermal(0.5, -0.1)])
def test_constructors_reject_bad_parameters(bad):
    with pytest.raises(InvalidArgumentError):
        bad()


def test_apply_on_scalar_and_matrix():
    ch = make_thermal(0.5, 1.0)
    assert ch.apply(1.0) == pytest.approx(2.0)
    assert np.allclose(ch.apply(np.eye(2)), 2.0 * np.eye(2))


def test_composition_order():
    first, second = make_loss(0.5), make_amplifier(3.0)
    both = second @ first
    assert both == compose(second, first)
    assert both.apply(5.0) == pytest.approx(second.apply(first.apply(5.0)))


def test_vacuum_output_noise_of_thermal_channel():
    assert output_noise_photons(make_thermal(0.3, 2.0)) == pytest.approx(0.7 * 2.0)
    assert output_noise_photons(make_additive(0.4), 1.0) == pytest.approx(1.4)


@pytest.mark.parametrize("eta", np.linspace(0.05, 0.95, 7))
@pytest.mark.parametrize("n_b", [0.0, 0.3, 5.0, 40.0])
def test_decompositions_are_exact(eta, n_b):
    target = make_thermal(eta, n_b)
    assert distance(thermal_via_amplifier(eta, n_b), target) <= 1e-14 * max(1.0, target.y)
    assert distance(thermal_via_additive(eta, n_b), target) <= 1e-14 * max(1.0, target.y)


@pytest.mark.parametrize("n_bar", [0.0, 0.1, 1.0, 10.0])
def test_additive_from_amplifier(n_bar):
    assert distance(additive_via_amplifier(n_bar), make_additive(n_bar)) <= 1e-14


def test_physicality():
    assert make_thermal(0.4, 0.0).is_physical()
    assert make_amplifier(2.0).physicality_margin() == pytest.approx(0.0)
    assert not GaussChannel(1.0, 0.0).physicality_margin() < 0
    assert not GaussChannel(2.0, 1.0).is_physical()


def test_residual_report_keys():
    res = decomposition_residuals(0.3, 2.0, 1.5)
    assert set(res) == {"thermal=additive.loss", "thermal=amplifier.loss", "additive=amplifier.loss"}
    assert max(res.values()) < 1e-14
