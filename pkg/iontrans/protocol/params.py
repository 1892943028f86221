"""
DESCRIPTION

    Parameters shared by the transfer steps and the chain preparation every run starts from.

    Step II/III quantities are expressed in units of the trap frequency ω, step I quantities in units of the cavity
    decay rate κ. kappa_over_omega and trap_frequency_hz connect both scales to physical time.
"""

import logging
from dataclasses import dataclass, fields
from typing import Optional, Tuple

import numpy as np

from ..chain import (
    ChainGeometry,
    CouplingProfile,
    ModeTable,
    QuadrupoleFieldConfig,
    QuadrupoleProfile,
    axial_mode_spectrum,
    cavity_coupling_profile,
    coupling_profile_from_phases,
    equilibrium_positions,
    quadrupole_weight_profile,
    sample_coupling_profile,
)
from ..errors import ConfigError, GeometryError

###############################################################################
# global constants
###############################################################################
PHASE_MODES = ("sampled", "physical", "explicit")
COMPRESSION_MODES = ("auto", "on", "off")
STEP2_METHODS = ("auto", "rk", "magnus")

POSITIVE_FIELDS = (
    "chirp_duration",
    "pulse_width_fraction",
    "stark_range_factor",
    "omega1",
    "g0",
    "ramp_duration",
    "retrieval_threshold",
    "retrieval_time_max",
    "kappa_over_omega",
    "trap_frequency_hz",
    "tol",
)
NON_NEGATIVE_FIELDS = ("omega_max", "eta_spurious", "chirp_half_width", "nbar_spurious", "gamma")

logger = logging.getLogger(__name__)


###############################################################################
# Classes
###############################################################################
@dataclass(frozen=True)
class ProtocolParams:
    # Steps II and III (units of ω)
    omega_max: float = 0.01
    eta: float = 0.1
    eta_spurious: float = 0.4
    chirp_half_width: float = 8e-3
    chirp_duration: float = 4e4
    pulse_width_fraction: float = 0.2
    rwa: bool = False
    nbar_spurious: float = 0.0
    stark_range_factor: float = 10.0
    calibrate_stark: bool = True

    # Step I (units of κ)
    omega1: float = 50.0
    gamma: float = 10.0
    g0: float = 8.0
    delta_stirap: float = 0.0
    ramp_duration: float = 2.0
    retrieval_threshold: float = 1e-4
    retrieval_time_max: float = 200.0

    # Scales
    kappa_over_omega: float = 1.0
    trap_frequency_hz: float = 1e6

    # Sector caps of steps II and III
    max_ion_excitations: int = 3
    total_excitation_cap: int = 3
    bus_cutoff: int = 3
    spurious_cutoff: int = 3

    # Collective compression of step II
    compression: str = "auto"
    compression_min_ions: int = 31
    compression_depth: int = 6
    compression_rank: int = 48

    # Numerics
    tol: float = 1e-9
    max_dimension: int = 200_000
    step2_method: str = "auto"
    convergence_check: bool = False

    def __post_init__(self):
        for name in POSITIVE_FIELDS:
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"must be positive (got {value})", field=name)
        for name in NON_NEGATIVE_FIELDS:
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ConfigError(f"must be non-negative (got {value})", field=name)
        if not 0 < self.eta < 1:
            raise ConfigError(f"must lie in (0, 1) (got {self.eta})", field="eta")
        if self.max_ion_excitations < 1:
            raise ConfigError("must be at least 1", field="max_ion_excitations")
        if self.total_excitation_cap < self.max_ion_excitations:
            raise ConfigError("must not be below max_ion_excitations", field="total_excitation_cap")
        if self.bus_cutoff < 1:
            raise ConfigError("must be at least 1", field="bus_cutoff")
        if self.spurious_cutoff < 0:
            raise ConfigError("must be non-negative", field="spurious_cutoff")
        if self.compression not in COMPRESSION_MODES:
            raise ConfigError(f"must be one of {COMPRESSION_MODES}", field="compression")
        if self.step2_method not in STEP2_METHODS:
            raise ConfigError(f"must be one of {STEP2_METHODS}", field="step2_method")
        for name in ("compression_min_ions", "compression_depth", "compression_rank", "max_dimension"):
            if getattr(self, name) < 1:
                raise ConfigError("must be at least 1", field=name)

    @property
    def trap_angular_frequency(self) -> float:
        """ω in rad/s."""
        return 2 * np.pi * self.trap_frequency_hz

    @property
    def kappa(self) -> float:
        """κ in rad/s."""
        return self.kappa_over_omega * self.trap_angular_frequency

    @property
    def stark_bound(self) -> float:
        """Half-width C·Ω²/ω of the Stark-offset search interval."""
        return self.stark_range_factor * self.omega_max**2

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class GeometryInputs:
    """How to lay out one chain realization.

    phase_mode "sampled" draws the cavity phases uniformly with the generator seeded by (seed, n_ions, realization);
    "physical" derives them from the equilibrium positions and wavelength_over_length (λ/ℓ); "explicit" takes phases
    as given.
    """

    n_ions: int
    phase_mode: str = "sampled"
    wavelength_over_length: Optional[float] = None
    cavity_phase: float = 0.0
    pattern_phase: float = 0.0
    seed: int = 0
    realization: int = 0
    addressed_ion: Optional[int] = None
    phases: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.n_ions < 1:
            raise GeometryError(f"n_ions must be positive (got {self.n_ions})")
        if self.phase_mode not in PHASE_MODES:
            raise GeometryError(f"unknown phase mode '{self.phase_mode}', expected one of {PHASE_MODES}")
        if self.phase_mode == "physical" and not (self.wavelength_over_length or 0) > 0:
            raise GeometryError("the physical phase mode needs a positive wavelength_over_length")
        if self.phase_mode == "explicit" and (self.phases is None or len(self.phases) != self.n_ions):
            raise GeometryError(f"the explicit phase mode needs {self.n_ions} phases")
        if self.addressed_ion is not None and not 0 <= self.addressed_ion < self.n_ions:
            raise GeometryError(f"addressed ion {self.addressed_ion} is outside the chain of {self.n_ions}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.n_ions, self.realization])


@dataclass(frozen=True)
class PreparedChain:
    inputs: GeometryInputs
    geometry: ChainGeometry
    modes: ModeTable
    coupling: CouplingProfile
    quadrupole: QuadrupoleProfile

    @property
    def n_ions(self) -> int:
        return self.geometry.n_ions

    @property
    def spurious_frequency(self) -> float:
        return spurious_frequency(self.modes)


###############################################################################
# Functions
###############################################################################
def spurious_frequency(modes: ModeTable) -> float:
    """Frequency of the spurious proxy mode: the stretch mode of the chain, √3ω for a single ion."""
    if len(modes.frequencies) > 1:
        return float(modes.frequencies[1])
    return float(np.sqrt(3.0))


def prepare_chain(inputs: GeometryInputs, params: ProtocolParams) -> PreparedChain:
    """Geometry, modes and per-ion weights shared by every step of one run.

    Raises
    ------
    GeometryError
        For an invalid geometry or weight parameter
    """
    geometry = equilibrium_positions(inputs.n_ions)
    modes = axial_mode_spectrum(geometry)

    if inputs.phase_mode == "sampled":
        coupling = sample_coupling_profile(geometry, params.g0, inputs.rng())
    elif inputs.phase_mode == "physical":
        k = 2 * np.pi / inputs.wavelength_over_length
        coupling = cavity_coupling_profile(geometry, params.g0, k, inputs.cavity_phase)
    else:
        coupling = coupling_profile_from_phases(geometry, params.g0, inputs.phases)

    quadrupole = quadrupole_weight_profile(
        geometry,
        QuadrupoleFieldConfig(pattern_phase=inputs.pattern_phase),
        params.eta,
        params.eta_spurious,
        coupling,
        params.nbar_spurious,
    )
    logger.debug(
        "prepared %d-ion chain (%s phases, realization %d)", inputs.n_ions, inputs.phase_mode, inputs.realization
    )
    return PreparedChain(inputs, geometry, modes, coupling, quadrupole)
