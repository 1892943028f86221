"""
DESCRIPTION

    Logical channels and their average fidelity.

    A channel E on a d-dimensional logical space is stored as its superoperator S in row-major vectorisation,
    vec(E(ρ)) = S vec(ρ). Channels may be trace decreasing: the missing trace is leakage out of the logical space.

    The uniform average over pure inputs of ⟨ψ|U† E(|ψ⟩⟨ψ|) U|ψ⟩ is evaluated exactly as
    [Tr(S_U† S) + Tr E(I)] / (d(d+1)), with S_U = U ⊗ Ū.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from ..errors import DimensionMismatchError, IonTransError

###############################################################################
# global constants
###############################################################################
LEAKAGE_WARNING = 0.5
CP_TOLERANCE = 1e-6

logger = logging.getLogger(__name__)


###############################################################################
# Classes
###############################################################################
@dataclass
class ChannelEstimate:
    superoperator: np.ndarray
    dimension: int

    def __post_init__(self):
        d = self.dimension
        if self.superoperator.shape != (d * d, d * d):
            raise DimensionMismatchError(f"superoperator of shape {self.superoperator.shape} for dimension {d}")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        d = self.dimension
        return (self.superoperator @ np.asarray(rho, dtype=complex).ravel()).reshape(d, d)

    @property
    def trace_of_identity(self) -> float:
        return float(np.trace(self.apply(np.eye(self.dimension))).real)

    @property
    def leakage(self) -> float:
        """1 − Tr E(I)/d, clipped to [0, 1]."""
        return float(np.clip(1.0 - self.trace_of_identity / self.dimension, 0.0, 1.0))

    @property
    def leakage_warning(self) -> bool:
        return self.leakage > LEAKAGE_WARNING

    def choi(self) -> np.ndarray:
        """Σ_jk |j⟩⟨k| ⊗ E(|j⟩⟨k|)."""
        d = self.dimension
        blocks = self.superoperator.reshape(d, d, d, d)  # [a, b, j, k] = E(|j⟩⟨k|)_ab
        return blocks.transpose(2, 0, 3, 1).reshape(d * d, d * d)

    def is_completely_positive(self, tol: float = CP_TOLERANCE) -> bool:
        choi = self.choi()
        return bool(np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))[0] >= -tol)


###############################################################################
# Construction
###############################################################################
def standard_inputs(d: int) -> List[np.ndarray]:
    """Pure inputs of the reconstruction: |k⟩ for every k, then (|j⟩+|k⟩)/√2 and (|j⟩+i|k⟩)/√2 for j<k.

    For d = 2 this is |0⟩, |1⟩, |+⟩, |+i⟩.
    """
    eye = np.eye(d, dtype=complex)
    inputs = [eye[k] for k in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            inputs.append((eye[j] + eye[k]) / np.sqrt(2))
            inputs.append((eye[j] + 1j * eye[k]) / np.sqrt(2))
    return inputs


def reconstruct_channel(outputs: Sequence[np.ndarray]) -> ChannelEstimate:
    """Channel whose outputs on standard_inputs(d) are the given d×d matrices (same order)."""
    outputs = [np.asarray(o, dtype=complex) for o in outputs]
    d = outputs[0].shape[0]
    if len(outputs) != d * d:
        raise DimensionMismatchError(f"{len(outputs)} outputs for a {d}-dimensional channel, expected {d * d}")

    images = {}
    for k in range(d):
        images[k, k] = outputs[k]
    position = d
    for j in range(d):
        for k in range(j + 1, d):
            plus, plus_i = outputs[position], outputs[position + 1]
            position += 2
            a = 2 * plus - images[j, j] - images[k, k]
            b = 2 * plus_i - images[j, j] - images[k, k]
            images[j, k] = 0.5 * (a + 1j * b)
            images[k, j] = 0.5 * (a - 1j * b)

    superoperator = np.zeros((d * d, d * d), dtype=complex)
    for (j, k), image in images.items():
        superoperator[:, j * d + k] = image.ravel()
    return ChannelEstimate(superoperator, d)


def channel_from_kraus(kraus: Sequence[np.ndarray]) -> ChannelEstimate:
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    d = kraus[0].shape[0]
    return ChannelEstimate(sum(np.kron(k, k.conj()) for k in kraus), d)


def unitary_channel(unitary: np.ndarray) -> ChannelEstimate:
    return channel_from_kraus([unitary])


def identity_channel(d: int) -> ChannelEstimate:
    return unitary_channel(np.eye(d))


def amplitude_damping_channel(gamma: float) -> ChannelEstimate:
    """Qubit channel losing the excitation of |1⟩ to |0⟩ with probability gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise IonTransError(f"damping probability must lie in [0, 1] (got {gamma})")
    k0 = np.diag([1.0, np.sqrt(1.0 - gamma)])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return channel_from_kraus([k0, k1])


def dephasing_channel(p: float, d: int = 2) -> ChannelEstimate:
    """ρ → (1 − p) ρ + p diag(ρ); p = 1 dephases completely."""
    if not 0.0 <= p <= 1.0:
        raise IonTransError(f"dephasing probability must lie in [0, 1] (got {p})")
    projectors = [np.sqrt(p) * np.diag(np.eye(d)[k]) for k in range(d)]
    return channel_from_kraus([np.sqrt(1.0 - p) * np.eye(d)] + projectors)


def diagonal_loss_channel(survival: Sequence[float]) -> ChannelEstimate:
    """Trace-decreasing channel keeping level k with amplitude √survival[k] and coherences in proportion."""
    survival = np.asarray(survival, dtype=float)
    if np.any(survival < 0) or np.any(survival > 1):
        raise IonTransError(f"survival probabilities must lie in [0, 1] (got {survival})")
    return channel_from_kraus([np.diag(np.sqrt(survival))])


def compose_channels(*channels: ChannelEstimate) -> ChannelEstimate:
    """The channel applying channels[0] first, then channels[1], and so on."""
    if not channels:
        raise IonTransError("nothing to compose")
    d = channels[0].dimension
    superoperator = np.eye(d * d, dtype=complex)
    for channel in channels:
        if channel.dimension != d:
            raise DimensionMismatchError(f"cannot compose channels of dimensions {d} and {channel.dimension}")
        superoperator = channel.superoperator @ superoperator
    return ChannelEstimate(superoperator, d)


def tensor_channels(*channels: ChannelEstimate) -> ChannelEstimate:
    """The channel acting with channels[k] on the k-th factor of a product space (first factor most significant)."""
    if not channels:
        raise IonTransError("nothing to combine")
    superoperator, d = np.ones((1, 1), dtype=complex), 1
    for channel in channels:
        e = channel.dimension
        left = superoperator.reshape(d, d, d, d)  # [a, b, j, k] = E(|j⟩⟨k|)_ab
        right = channel.superoperator.reshape(e, e, e, e)
        d *= e
        superoperator = np.einsum("abjk,cdlm->acbdjlkm", left, right).reshape(d * d, d * d)
    return ChannelEstimate(superoperator, d)


###############################################################################
# Fidelity
###############################################################################
def _target_superoperator(target, d: int) -> np.ndarray:
    if isinstance(target, ChannelEstimate):
        return target.superoperator
    target = np.asarray(target, dtype=complex)
    if target.shape != (d, d):
        raise DimensionMismatchError(f"target of shape {target.shape} for a {d}-dimensional channel")
    return np.kron(target, target.conj())


def average_channel_fidelity(channel: ChannelEstimate, target=None) -> float:
    """Uniform pure-state average of ⟨ψ|U† E(|ψ⟩⟨ψ|) U|ψ⟩, evaluated exactly.

    Parameters
    ----------
    channel : ChannelEstimate
        The reconstructed channel
    target : np.ndarray or ChannelEstimate, optional
        The ideal unitary U (identity when absent); a unitary ChannelEstimate is accepted too

    Returns
    -------
    float
        The average fidelity, in [0, 1]
    """
    d = channel.dimension
    target_superoperator = _target_superoperator(np.eye(d) if target is None else target, d)
    overlap = np.trace(target_superoperator.conj().T @ channel.superoperator).real
    value = (overlap + channel.trace_of_identity) / (d * (d + 1))
    if channel.leakage_warning:
        logger.warning("channel leakage %.3f exceeds %.1f", channel.leakage, LEAKAGE_WARNING)
    return float(np.clip(value, 0.0, 1.0))


def phase_corrected(channel: ChannelEstimate, target=None) -> Tuple[ChannelEstimate, np.ndarray]:
    """Follow the channel with the diagonal phase rotation (in the target frame) that maximises its fidelity.

    The rotation is diag(1, e^{iφ_1}, ...) applied after U†; the returned channel is (U Z U†) ∘ E.

    Returns
    -------
    corrected : ChannelEstimate
    phases : np.ndarray
        φ_0 = 0, φ_1, ..., φ_{d−1}
    """
    d = channel.dimension
    unitary = np.eye(d, dtype=complex) if target is None else np.asarray(target, dtype=complex)
    frame = compose_channels(channel, unitary_channel(unitary.conj().T))
    s = frame.superoperator
    # M_jl = Σ_k (K_k)_jj conj((K_k)_ll)
    m = np.array([[s[j * d + l, j * d + l] for l in range(d)] for j in range(d)])

    if d == 2:
        phases = np.array([0.0, -np.angle(m[1, 0])])
    else:
        def loss(phi):
            z = np.exp(1j * np.concatenate([[0.0], phi]))
            return -np.real(z @ m @ z.conj())

        start = -np.angle(m[1:, 0])
        phases = np.concatenate([[0.0], minimize(loss, start, method="BFGS").x])

    rotation = unitary @ np.diag(np.exp(1j * phases)) @ unitary.conj().T
    return compose_channels(channel, unitary_channel(rotation)), phases


def monte_carlo_average_fidelity(
    channel: ChannelEstimate, target=None, samples: int = 1_000_000, rng: Optional[np.random.Generator] = None
) -> float:
    """Sampled estimate of the average fidelity over Haar-random pure inputs."""
    d = channel.dimension
    rng = np.random.default_rng(0) if rng is None else rng
    unitary = np.eye(d, dtype=complex) if target is None else np.asarray(target, dtype=complex)
    psi = rng.normal(size=(samples, d)) + 1j * rng.normal(size=(samples, d))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    vec = (psi[:, :, None] * psi.conj()[:, None, :]).reshape(samples, d * d)
    out = (vec @ channel.superoperator.T).reshape(samples, d, d)
    phi = psi @ unitary.T
    values = np.einsum("ni,nij,nj->n", phi.conj(), out, phi).real
    return float(values.mean())


def input_fidelities(channel: ChannelEstimate, target=None) -> np.ndarray:
    """⟨ψ|U† E(|ψ⟩⟨ψ|) U|ψ⟩ for every standard input ψ, in the order of standard_inputs."""
    d = channel.dimension
    unitary = np.eye(d, dtype=complex) if target is None else np.asarray(target, dtype=complex)
    values = []
    for psi in standard_inputs(d):
        expected = unitary @ psi
        values.append(np.vdot(expected, channel.apply(np.outer(psi, psi.conj())) @ expected).real)
    return np.array(values)
