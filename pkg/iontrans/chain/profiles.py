"""
DESCRIPTION

    Per-ion weights consumed by the Hamiltonians: cavity couplings g_i = g0 sin(k z_i + φ) and the quadrupole carrier
    and sideband weights c_i = cos(·), s_i = −sin(·) of the standing-wave drive.
"""

import logging
from itertools import combinations
from typing import Optional

import numpy as np

from ..errors import GeometryError
from .model import ChainGeometry, CouplingProfile, QuadrupoleFieldConfig, QuadrupoleProfile

logger = logging.getLogger(__name__)


def cavity_coupling_profile(geom: ChainGeometry, g0: float, k: float, phase: float = 0.0) -> CouplingProfile:
    """Couplings of the ions to the cavity standing wave ("physical" phase mode).

    Parameters
    ----------
    geom : ChainGeometry
        The chain geometry (positions in units of ℓ)
    g0 : float
        The vacuum Rabi frequency at an antinode
    k : float
        The cavity wavevector in units of 1/ℓ
    phase : float
        Global phase φ of the standing wave

    Returns
    -------
    CouplingProfile
    """
    if g0 <= 0:
        raise GeometryError(f"g0 must be positive (got {g0})")
    phases = k * geom.positions + phase
    return CouplingProfile(g0 * np.sin(phases), g0, phases, k, phase)


def coupling_profile_from_phases(geom: ChainGeometry, g0: float, phases) -> CouplingProfile:
    phases = np.asarray(phases, dtype=float)
    if g0 <= 0:
        raise GeometryError(f"g0 must be positive (got {g0})")
    if phases.shape != (geom.n_ions,):
        raise GeometryError(f"expected {geom.n_ions} phases, got shape {phases.shape}")
    return CouplingProfile(g0 * np.sin(phases), g0, phases)


def sample_coupling_profile(geom: ChainGeometry, g0: float, rng: np.random.Generator) -> CouplingProfile:
    """Couplings with i.i.d. uniform phases ("sampled" phase mode)."""
    return coupling_profile_from_phases(geom, g0, rng.uniform(0.0, 2 * np.pi, size=geom.n_ions))


def quadrupole_weight_profile(
    geom: ChainGeometry,
    cfg: QuadrupoleFieldConfig,
    eta: float,
    eta_spurious: float,
    coupling: Optional[CouplingProfile] = None,
    nbar_spurious: float = 0.0,
) -> QuadrupoleProfile:
    """Carrier and sideband weights of the quadrupole drive.

    The pattern phase of ion i is the cavity phase of ion i shifted by cfg.pattern_phase, so that a zero pattern
    phase reproduces the cavity pattern and s_i = −g_i/g0.

    Parameters
    ----------
    geom : ChainGeometry
        The chain geometry
    cfg : QuadrupoleFieldConfig
        The drive configuration
    eta : float
        Single-ion Lamb-Dicke parameter η of the bus mode
    eta_spurious : float
        Lamb-Dicke parameter η̃ of the spurious proxy mode
    coupling : CouplingProfile, optional
        The cavity profile whose phases the drive follows; phases are taken as zero when absent
    nbar_spurious : float
        Initial thermal occupation of the spurious mode

    Returns
    -------
    QuadrupoleProfile
    """
    if not 0 < eta < 1:
        raise GeometryError(f"the Lamb-Dicke parameter must lie in (0, 1) (got {eta})")
    if eta_spurious < 0:
        raise GeometryError(f"the spurious Lamb-Dicke parameter must be non-negative (got {eta_spurious})")
    if nbar_spurious < 0:
        raise GeometryError(f"the spurious occupation must be non-negative (got {nbar_spurious})")

    cavity_phases = coupling.phases if coupling is not None else np.zeros(geom.n_ions)
    phases = cavity_phases + cfg.pattern_phase
    return QuadrupoleProfile(np.cos(phases), -np.sin(phases), eta, eta_spurious, nbar_spurious)


def collective_coupling(profile: CouplingProfile) -> float:
    """Collectively enhanced coupling √(Σ g_i²) of the single-excitation Dicke state."""
    return float(np.sqrt(np.sum(profile.g**2)))


def enhancement_factor(profile: CouplingProfile, n_excitations: int) -> float:
    """Coupling of the n-excitation weighted Dicke state relative to g0.

    For homogeneous couplings this equals binomial(N, n)^(1/2).
    """
    weights = profile.g / profile.g0
    total = sum(np.prod(weights[list(subset)]) ** 2 for subset in combinations(range(len(weights)), n_excitations))
    return float(np.sqrt(total))
