"""
DESCRIPTION

    Photonic two-photon phase gate α0|0⟩ + α1|1⟩ + α2|2⟩ → α0|0⟩ + α1|1⟩ − α2|2⟩.

    Photon number k is carried by the register of the ion pair (i₁, i₁+1): |0⟩ ↔ |00⟩, |1⟩ ↔ |10⟩, |2⟩ ↔ |11⟩.
    Every excitation is stored in the chain, mapped down to its ion by steps II and III, the pair is phase flipped by
    an ideal controlled-Z and the excitations are mapped back out. Storage is the time reverse of the retrieval and
    runs each step's simulated channel with its retrieval-direction efficiency, so losses, leakage and residual
    phases of the steps enter the round trip coherently.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..dynamics import (
    ChannelEstimate,
    amplitude_damping_channel,
    average_channel_fidelity,
    channel_from_kraus,
    compose_channels,
    identity_channel,
    reconstruct_channel,
    standard_inputs,
    tensor_channels,
    unitary_channel,
)
from ..errors import GeometryError, NormalizationError
from .joint import run_joint_protocol, tagged_step
from .model import GateReport
from .params import GeometryInputs, ProtocolParams
from .step1 import run_multi_excitation_retrieval

###############################################################################
# global constants
###############################################################################
NORMALIZATION_TOLERANCE = 1e-8
PHASE_FLIP = np.array([1.0, 1.0, -1.0])
PAIR_PHASE_FLIP = np.diag([1.0, 1.0, 1.0, -1.0])

# register index |q(i₁) q(i₁+1)⟩ = 2 q(i₁) + q(i₁+1) of the photon numbers 0, 1, 2
LEVEL_INDEX = (0, 2, 3)
SECOND_ION_ONLY = 1

logger = logging.getLogger(__name__)


###############################################################################
# Register
###############################################################################
def embed_amplitudes(amplitudes: np.ndarray) -> np.ndarray:
    register = np.zeros(4, dtype=complex)
    register[list(LEVEL_INDEX)] = amplitudes
    return register


def photonic_state(register: np.ndarray) -> np.ndarray:
    """Photon-number density matrix retrieved from a pair density matrix.

    An excitation left on ion i₁+1 alone comes out as one photon without coherence to the other levels.
    """
    readout = np.zeros((3, 4))
    readout[[0, 1, 2], list(LEVEL_INDEX)] = 1.0
    stray = np.zeros((3, 4))
    stray[1, SECOND_ION_ONLY] = 1.0
    return readout @ register @ readout.T + stray @ register @ stray.T


def pair_retrieval_channel(single: float, pair: Optional[float] = None) -> ChannelEstimate:
    """Step I acting on both ions of the register.

    Parameters
    ----------
    single : float
        Retrieval fidelity F2 of one excitation
    pair : float, optional
        Retrieval fidelity of the two-excitation spin wave; the excitations are damped independently when absent

    Returns
    -------
    ChannelEstimate
        A trace-preserving channel on the 4-dimensional register
    """
    single = float(np.clip(single, 0.0, 1.0))
    if pair is None:
        damping = amplitude_damping_channel(1.0 - single)
        return tensor_channels(damping, damping)

    pair = float(np.clip(pair, 0.0, 1.0))
    survival = np.array([1.0, single, single, pair])
    kraus = [np.diag(np.sqrt(survival))]
    for index in range(1, 4):
        lost = np.zeros((4, 4))
        lost[0, index] = np.sqrt(1.0 - survival[index])
        kraus.append(lost)
    return channel_from_kraus(kraus)


def pair_transfer_channels(
    params: ProtocolParams, inputs: GeometryInputs, two_photon: bool = False
) -> Tuple[ChannelEstimate, ChannelEstimate, Dict[str, float]]:
    """Channels of the register from the photons down to the ion pair and back up, with the step fidelities.

    Both excitations run through the step II and III channels of the joint run independently. Step I uses the
    two-excitation retrieval for |11⟩ when two_photon is set.
    """
    joint = run_joint_protocol(params, inputs)
    step_fidelities = dict(joint.step_fidelities)
    pair = None
    if two_photon:
        pair = tagged_step("I", run_multi_excitation_retrieval, params, inputs, 2).fidelity
        step_fidelities["I(2)"] = pair

    retrieval = pair_retrieval_channel(joint.step1.fidelity, pair)
    bus = tensor_channels(joint.step2.channel, joint.step2.channel)
    ion = tensor_channels(joint.step3.channel, joint.step3.channel)
    down = compose_channels(retrieval, bus, ion)
    up = compose_channels(ion, bus, retrieval)
    return down, up, step_fidelities


def photonic_gate_channel(round_trip: ChannelEstimate) -> ChannelEstimate:
    """The round trip of the register seen on the photon numbers 0, 1, 2."""
    outputs = []
    for psi in standard_inputs(3):
        register = embed_amplitudes(psi)
        outputs.append(photonic_state(round_trip.apply(np.outer(register, register.conj()))))
    return reconstruct_channel(outputs)


def dominant_amplitudes(state: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Amplitudes of the leading pure component of the output, in the global phase of the target."""
    values, vectors = np.linalg.eigh(0.5 * (state + state.conj().T))
    amplitudes = np.sqrt(max(values[-1], 0.0)) * vectors[:, -1]
    projection = np.vdot(target, amplitudes)
    if abs(projection) > 0:
        amplitudes = amplitudes * np.exp(-1j * np.angle(projection))
    return amplitudes


###############################################################################
# Gate
###############################################################################
def run_photonic_phase_gate(
    params: ProtocolParams,
    amplitudes: Sequence[complex],
    inputs: Optional[GeometryInputs] = None,
    ideal: bool = False,
    two_photon: bool = False,
) -> GateReport:
    """Apply the round trip of the phase gate to (α0, α1, α2).

    Parameters
    ----------
    amplitudes : sequence of 3 complex
        Input amplitudes, normalised
    inputs : GeometryInputs, optional
        Chain realization of the simulated transfers; not needed when ideal
    ideal : bool
        Take every transfer as perfect
    two_photon : bool
        Retrieve and store |2⟩ as a two-excitation spin wave instead of two independent excitations

    Raises
    ------
    NormalizationError
        If Σ|α_k|² differs from 1
    """
    alpha = np.asarray(amplitudes, dtype=complex)
    if alpha.shape != (3,):
        raise NormalizationError(f"expected the three amplitudes α0, α1, α2 (got {alpha.shape[0]})")
    norm = float(np.sum(np.abs(alpha) ** 2))
    if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
        raise NormalizationError(f"Σ|α|² = {norm:.12f}, expected 1")

    if ideal:
        down = up = identity_channel(4)
        step_fidelities = {"III": 1.0, "II": 1.0, "I": 1.0}
    elif inputs is None:
        raise GeometryError("a simulated gate needs the chain realization")
    else:
        down, up, step_fidelities = pair_transfer_channels(params, inputs, two_photon)

    channel = photonic_gate_channel(compose_channels(down, unitary_channel(PAIR_PHASE_FLIP), up))
    target = PHASE_FLIP * alpha
    state = channel.apply(np.outer(alpha, alpha.conj()))
    success = float(np.trace(state).real)
    overlap = float(np.real(target.conj() @ state @ target))
    fidelity = overlap / success if success > 0 else 0.0
    survival = np.array([channel.apply(np.diag(level))[k, k].real for k, level in enumerate(np.eye(3))])

    logger.info("phase gate: overlap %.6f, success %.6f", overlap, success)
    return GateReport(
        inputs=alpha,
        outputs=dominant_amplitudes(state, target),
        target=target,
        output_state=state,
        survival=survival,
        success_probability=success,
        overlap=overlap,
        fidelity=fidelity,
        gate_fidelity=average_channel_fidelity(channel, np.diag(PHASE_FLIP)),
        step_fidelities=step_fidelities,
        ideal=ideal,
        channel=channel,
    )
