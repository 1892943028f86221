import numpy as np
import pytest
from scipy.stats import unitary_group

from iontrans.dynamics import (
    ChannelEstimate,
    amplitude_damping_channel,
    average_channel_fidelity,
    channel_from_kraus,
    compose_channels,
    dephasing_channel,
    diagonal_loss_channel,
    identity_channel,
    input_fidelities,
    monte_carlo_average_fidelity,
    phase_corrected,
    reconstruct_channel,
    standard_inputs,
    tensor_channels,
    unitary_channel,
)
from iontrans.errors import DimensionMismatchError, IonTransError

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)


def outputs_of(channel):
    return [channel.apply(np.outer(psi, psi.conj())) for psi in standard_inputs(channel.dimension)]


###############################################################################
# Average fidelity
###############################################################################
def test_identity_channel():
    assert average_channel_fidelity(identity_channel(2)) == pytest.approx(1.0)
    assert average_channel_fidelity(identity_channel(3)) == pytest.approx(1.0)


def test_swap_against_the_right_and_wrong_target():
    swap = unitary_channel(PAULI_X)
    assert average_channel_fidelity(swap, PAULI_X) == pytest.approx(1.0)
    assert average_channel_fidelity(swap, swap) == pytest.approx(1.0)
    assert average_channel_fidelity(swap) == pytest.approx(1.0 / 3.0)


def test_full_dephasing():
    assert average_channel_fidelity(dephasing_channel(1.0)) == pytest.approx(2.0 / 3.0)


@pytest.mark.parametrize("gamma", [0.0, 0.1, 0.5, 1.0])
def test_amplitude_damping(gamma):
    expected = ((1 + np.sqrt(1 - gamma)) ** 2 + 2) / 6
    assert average_channel_fidelity(amplitude_damping_channel(gamma)) == pytest.approx(expected)


def test_sampled_fidelity_agrees_with_the_closed_form():
    channel = amplitude_damping_channel(0.3)
    sampled = monte_carlo_average_fidelity(channel, samples=100_000, rng=np.random.default_rng(7))
    assert sampled == pytest.approx(average_channel_fidelity(channel), abs=3e-3)


def test_sampled_fidelity_of_a_target_unitary():
    sampled = monte_carlo_average_fidelity(unitary_channel(HADAMARD), HADAMARD, samples=1000)
    assert sampled == pytest.approx(1.0, abs=1e-12)


def test_input_fidelities_of_damping():
    superposed = 0.5 + 0.5 * np.sqrt(0.8)
    np.testing.assert_allclose(input_fidelities(amplitude_damping_channel(0.2)), [1.0, 0.8, superposed, superposed])


###############################################################################
# Construction
###############################################################################
def test_reconstruction_of_a_unitary_qutrit_channel(rng):
    channel = unitary_channel(unitary_group.rvs(3, random_state=rng))
    rebuilt = reconstruct_channel(outputs_of(channel))
    np.testing.assert_allclose(rebuilt.superoperator, channel.superoperator, atol=1e-12)


def test_reconstruction_of_a_leaky_channel(rng):
    kraus = [0.5 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))) / 3 for _ in range(2)]
    channel = channel_from_kraus(kraus)
    rebuilt = reconstruct_channel(outputs_of(channel))
    np.testing.assert_allclose(rebuilt.superoperator, channel.superoperator, atol=1e-12)
    assert rebuilt.is_completely_positive()


def test_reconstruction_needs_every_input():
    with pytest.raises(DimensionMismatchError):
        reconstruct_channel([np.eye(2)] * 3)


def test_superoperator_shape_is_checked():
    with pytest.raises(DimensionMismatchError):
        ChannelEstimate(np.eye(4), 3)


def test_standard_qubit_inputs():
    plus, plus_i = standard_inputs(2)[2:]
    np.testing.assert_allclose(plus, [1 / np.sqrt(2), 1 / np.sqrt(2)])
    np.testing.assert_allclose(plus_i, [1 / np.sqrt(2), 1j / np.sqrt(2)])
    assert len(standard_inputs(4)) == 16


def test_transpose_is_not_completely_positive():
    d = 2
    transpose = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            transpose[a * d + b, b * d + a] = 1.0
    assert not ChannelEstimate(transpose, d).is_completely_positive()
    assert unitary_channel(HADAMARD).is_completely_positive()


def test_composition_order():
    ground = np.diag([1.0, 0.0])
    hadamard_first = compose_channels(unitary_channel(HADAMARD), dephasing_channel(1.0))
    np.testing.assert_allclose(hadamard_first.apply(ground), np.eye(2) / 2, atol=1e-15)
    dephasing_first = compose_channels(dephasing_channel(1.0), unitary_channel(HADAMARD))
    np.testing.assert_allclose(dephasing_first.apply(ground), np.full((2, 2), 0.5), atol=1e-15)


def test_damping_composes_multiplicatively():
    composed = compose_channels(amplitude_damping_channel(0.2), amplitude_damping_channel(0.3))
    np.testing.assert_allclose(composed.superoperator, amplitude_damping_channel(1 - 0.8 * 0.7).superoperator)


def test_tensor_product_of_unitaries(rng):
    u = unitary_group.rvs(2, random_state=rng)
    v = unitary_group.rvs(3, random_state=rng)
    product = tensor_channels(unitary_channel(u), unitary_channel(v))
    assert product.dimension == 6
    np.testing.assert_allclose(product.superoperator, unitary_channel(np.kron(u, v)).superoperator, atol=1e-12)


def test_tensor_product_acts_on_each_factor():
    damped = tensor_channels(amplitude_damping_channel(0.25), identity_channel(2))
    both_excited = np.diag([0.0, 0.0, 0.0, 1.0])
    np.testing.assert_allclose(damped.apply(both_excited), np.diag([0.0, 0.25, 0.0, 0.75]), atol=1e-15)
    assert tensor_channels(diagonal_loss_channel([1.0, 0.5]), identity_channel(2)).leakage == pytest.approx(0.25)
    with pytest.raises(IonTransError):
        tensor_channels()


def test_composition_checks_dimensions():
    with pytest.raises(DimensionMismatchError):
        compose_channels(identity_channel(2), identity_channel(3))
    with pytest.raises(IonTransError):
        compose_channels()


@pytest.mark.parametrize("factory, value", [(amplitude_damping_channel, 1.2), (dephasing_channel, -0.1)])
def test_probabilities_are_checked(factory, value):
    with pytest.raises(IonTransError):
        factory(value)


###############################################################################
# Leakage and phase correction
###############################################################################
def test_leakage():
    mild = diagonal_loss_channel([1.0, 0.5])
    assert mild.leakage == pytest.approx(0.25)
    assert not mild.leakage_warning
    severe = diagonal_loss_channel([0.2, 0.2])
    assert severe.leakage == pytest.approx(0.8)
    assert severe.leakage_warning
    assert identity_channel(2).leakage == 0.0


def test_qubit_phase_correction():
    theta = 0.7
    channel = unitary_channel(np.diag([1.0, np.exp(1j * theta)]))
    corrected, phases = phase_corrected(channel)
    assert phases[0] == 0.0
    assert phases[1] == pytest.approx(-theta)
    assert average_channel_fidelity(corrected) == pytest.approx(1.0)
    assert average_channel_fidelity(channel) < 0.95


def test_qubit_phase_correction_in_the_target_frame():
    theta = -1.2
    channel = unitary_channel(np.diag([1.0, np.exp(1j * theta)]) @ PAULI_X)
    corrected, phases = phase_corrected(channel, PAULI_X)
    assert phases[1] == pytest.approx(theta)
    assert average_channel_fidelity(corrected, PAULI_X) == pytest.approx(1.0)


def test_qutrit_phase_correction():
    rotation = unitary_channel(np.diag(np.exp(1j * np.array([0.0, 0.4, -1.1]))))
    channel = compose_channels(rotation, dephasing_channel(0.1, 3))
    corrected, phases = phase_corrected(channel)
    np.testing.assert_allclose(phases, [0.0, -0.4, 1.1], atol=1e-6)
    assert average_channel_fidelity(corrected) == pytest.approx(average_channel_fidelity(dephasing_channel(0.1, 3)))


def test_phase_correction_never_lowers_the_fidelity():
    channel = amplitude_damping_channel(0.4)
    corrected, _ = phase_corrected(channel)
    assert average_channel_fidelity(corrected) >= average_channel_fidelity(channel) - 1e-12
