"""
DESCRIPTION

    Closed-form checks of the numerical machinery: resonant Rabi transfer, Landau–Zener transitions in both limits,
    atomic and cavity decay, the vacuum-Rabi splitting, F2 without spontaneous emission, the average fidelity of full
    dephasing and the equilibrium positions of two and three ions.
"""

import logging
from dataclasses import replace
from typing import Callable, Dict, List

import numpy as np
import scipy.sparse as sp

from ..chain import coupling_profile_from_phases, equilibrium_positions
from ..dynamics import (
    TimeDependentHamiltonian,
    average_channel_fidelity,
    dephasing_channel,
    evolve_density,
    evolve_state,
    monte_carlo_average_fidelity,
)
from ..protocol import GeometryInputs, ProtocolParams, run_step1_retrieval, vacuum_rabi_splitting
from ..statespace import (
    EXCITED,
    GROUND,
    SHELVED,
    BasisLabel,
    OperatorSpec,
    SectorConfig,
    basis_vector,
    build_operator,
    build_sector_basis,
)
from .model import OracleResult

###############################################################################
# global constants
###############################################################################
LZ_COUPLING = 0.01
LZ_ADIABATIC_EXPONENT = 10.0
LZ_ADIABATIC_DETUNING = 1.0
LZ_DIABATIC_EXPONENT = 0.1
LZ_DIABATIC_DETUNING = 20.0
ORACLE_PHASES = (0.3, 1.1, 2.0, 2.9)

logger = logging.getLogger(__name__)

oracle_entry_dict: Dict[str, Callable[[], OracleResult]] = dict()


def register_oracle(name: str):
    def decorator(oracle: Callable[[], OracleResult]) -> Callable[[], OracleResult]:
        assert name not in oracle_entry_dict, f"oracle {name} registered twice"
        oracle_entry_dict[name] = oracle
        return oracle

    return decorator


###############################################################################
# Oracles
###############################################################################
@register_oracle("rabi")
def rabi_oracle() -> OracleResult:
    """|⟨1|e^{−iΩσx t}|0⟩|² = sin²(Ωt), here at Ωt = π/3."""
    hamiltonian = TimeDependentHamiltonian(sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]])))
    trajectory = evolve_state(hamiltonian, np.array([1.0, 0.0]), [0.0, np.pi / 3], tol=1e-12)
    value = abs(trajectory.final_state[1]) ** 2
    return OracleResult("rabi", float(value), 0.75, 1e-6)


def landau_zener_survival(coupling: float, detuning: float, exponent: float, tol: float = 1e-10) -> float:
    """Population left in |0⟩ after Δ(t) sweeps linearly from −D to D under H = Δ(t)|1⟩⟨1| + Ω σx.

    The duration is chosen so that 2πΩ²/α equals exponent, α = 2D/T being the sweep rate.
    """
    duration = exponent * detuning / (np.pi * coupling**2)
    population = sp.csr_matrix(np.diag([0.0, 1.0]))
    drive = sp.csr_matrix(np.array([[0.0, coupling], [coupling, 0.0]]))
    hamiltonian = TimeDependentHamiltonian(drive, [(lambda t: -detuning + 2 * detuning * t / duration, population)])
    trajectory = evolve_state(hamiltonian, np.array([1.0, 0.0]), [0.0, duration], tol=tol, method="magnus")
    return float(abs(trajectory.final_state[0]) ** 2)


@register_oracle("landau-zener-adiabatic")
def landau_zener_adiabatic_oracle() -> OracleResult:
    value = landau_zener_survival(LZ_COUPLING, LZ_ADIABATIC_DETUNING, LZ_ADIABATIC_EXPONENT)
    return OracleResult("landau-zener-adiabatic", value, float(np.exp(-LZ_ADIABATIC_EXPONENT)), 1e-3)


@register_oracle("landau-zener-diabatic")
def landau_zener_diabatic_oracle() -> OracleResult:
    value = landau_zener_survival(LZ_COUPLING, LZ_DIABATIC_DETUNING, LZ_DIABATIC_EXPONENT)
    return OracleResult("landau-zener-diabatic", value, float(np.exp(-LZ_DIABATIC_EXPONENT)), 1e-3)


@register_oracle("atomic-decay")
def atomic_decay_oracle(gamma: float = 10.0, t: float = 0.1) -> OracleResult:
    """|e⟩ decaying to |1⟩ and |0⟩ at rate Γ each keeps e^{−2Γt}."""
    basis = build_sector_basis(SectorConfig(1, levels_per_ion=3))
    jumps = [
        (build_operator(OperatorSpec("transition", site=0, levels=(level, EXCITED)), basis), gamma)
        for level in (SHELVED, GROUND)
    ]
    excited = basis_vector(basis, BasisLabel((EXCITED,)))
    hamiltonian = TimeDependentHamiltonian(sp.csr_matrix((basis.dimension, basis.dimension), dtype=complex))
    trajectory = evolve_density(hamiltonian, jumps, np.outer(excited, excited), [0.0, t], tol=1e-12)
    index = basis.index_of(BasisLabel((EXCITED,)))
    value = trajectory.final_state[index, index]
    return OracleResult("atomic-decay", float(value.real), float(np.exp(-2 * gamma * t)), 1e-6)


@register_oracle("cavity-decay")
def cavity_decay_oracle(t: float = 1.0) -> OracleResult:
    """One photon leaking at κ = 1 keeps e^{−κt}."""
    basis = build_sector_basis(SectorConfig(1, photon_cutoff=1, total_excitation_cap=1))
    photon = basis_vector(basis, basis.ground_label(n_photon=1))
    jumps = [(build_operator(OperatorSpec("lower", mode="photon"), basis), 1.0)]
    number = build_operator(OperatorSpec("number", mode="photon"), basis)
    hamiltonian = TimeDependentHamiltonian(sp.csr_matrix((basis.dimension, basis.dimension), dtype=complex))
    trajectory = evolve_density(
        hamiltonian, jumps, np.outer(photon, photon), [0.0, t], tol=1e-12, observables={"photons": number}
    )
    return OracleResult("cavity-decay", float(trajectory.observables["photons"][-1].real), float(np.exp(-t)), 1e-6)


@register_oracle("vacuum-rabi-splitting")
def vacuum_rabi_oracle() -> OracleResult:
    params = ProtocolParams()
    geometry = equilibrium_positions(len(ORACLE_PHASES))
    coupling = coupling_profile_from_phases(geometry, params.g0, ORACLE_PHASES)
    expected = 2 * np.sqrt(np.sum(coupling.g**2))
    return OracleResult("vacuum-rabi-splitting", vacuum_rabi_splitting(coupling, params), expected, 1e-9, True)


@register_oracle("retrieval-without-emission")
def retrieval_without_emission_oracle() -> OracleResult:
    """F2 = 1 when Γ = 0."""
    params = replace(ProtocolParams(), gamma=0.0)
    inputs = GeometryInputs(2, phase_mode="explicit", phases=ORACLE_PHASES[:2])
    return OracleResult("retrieval-without-emission", run_step1_retrieval(params, inputs).fidelity, 1.0, 1e-8)


@register_oracle("dephasing-fidelity")
def dephasing_oracle() -> OracleResult:
    """Average fidelity of the fully dephasing qubit channel, 2/3, sampled over 10⁶ random inputs."""
    channel = dephasing_channel(1.0)
    exact = average_channel_fidelity(channel)
    assert abs(exact - 2.0 / 3.0) < 1e-12
    return OracleResult("dephasing-fidelity", monte_carlo_average_fidelity(channel), exact, 1e-3)


@register_oracle("equilibrium-2")
def two_ion_oracle() -> OracleResult:
    """±(1/4)^(1/3)."""
    positions = equilibrium_positions(2).positions
    expected = np.array([-1.0, 1.0]) * 0.25 ** (1 / 3)
    return OracleResult("equilibrium-2", float(np.max(np.abs(positions - expected))), 0.0, 1e-10)


@register_oracle("equilibrium-3")
def three_ion_oracle() -> OracleResult:
    """0 and ±(5/4)^(1/3)."""
    positions = equilibrium_positions(3).positions
    expected = np.array([-1.0, 0.0, 1.0]) * 1.25 ** (1 / 3)
    return OracleResult("equilibrium-3", float(np.max(np.abs(positions - expected))), 0.0, 1e-10)


###############################################################################
# Suite
###############################################################################
def run_oracle_suite() -> List[OracleResult]:
    results = []
    for name, oracle in oracle_entry_dict.items():
        result = oracle()
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(
            level,
            "%s: %.12g vs %.12g (error %.2e, tolerance %.0e)",
            name,
            result.value,
            result.expected,
            result.error,
            result.tolerance,
        )
        results.append(result)
    return results
