from .model import ChainGeometry, ModeTable, CouplingProfile, QuadrupoleFieldConfig, QuadrupoleProfile
from .equilibrium import equilibrium_positions, axial_mode_spectrum, length_scale
from .profiles import (
    cavity_coupling_profile,
    coupling_profile_from_phases,
    sample_coupling_profile,
    quadrupole_weight_profile,
    collective_coupling,
    enhancement_factor,
)

__all__ = [
    "ChainGeometry",
    "ModeTable",
    "CouplingProfile",
    "QuadrupoleFieldConfig",
    "QuadrupoleProfile",
    "equilibrium_positions",
    "axial_mode_spectrum",
    "length_scale",
    "cavity_coupling_profile",
    "coupling_profile_from_phases",
    "sample_coupling_profile",
    "quadrupole_weight_profile",
    "collective_coupling",
    "enhancement_factor",
]
