from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ChainGeometry:
    """Equilibrium configuration of a linear chain, positions in units of the length scale ℓ."""

    n_ions: int
    positions: np.ndarray
    residual: float
    length_scale: Optional[float] = None


@dataclass(frozen=True)
class ModeTable:
    """Axial normal modes; frequencies in units of the trap frequency ω, mode vectors as columns."""

    frequencies: np.ndarray
    mode_vectors: np.ndarray


@dataclass(frozen=True)
class CouplingProfile:
    g: np.ndarray
    g0: float
    phases: np.ndarray
    k: Optional[float] = None
    phase_offset: float = 0.0


@dataclass(frozen=True)
class QuadrupoleFieldConfig:
    # theta, k_x and omega0 only document the beam geometry; the dynamics sees the sin(kz) pattern
    theta: float = 0.0
    k_x: float = 0.0
    omega0: float = 0.0
    pattern_phase: float = 0.0


@dataclass(frozen=True)
class QuadrupoleProfile:
    carrier_weights: np.ndarray
    sideband_weights: np.ndarray
    eta_com: float
    eta_spurious: float
    nbar_spurious: float = 0.0

    @property
    def n_ions(self) -> int:
        return len(self.carrier_weights)

    @property
    def com_factor(self) -> float:
        """Per-ion COM sideband factor η/√N."""
        return self.eta_com / np.sqrt(self.n_ions)

    @property
    def spurious_factor(self) -> float:
        return self.eta_spurious / np.sqrt(self.n_ions)
