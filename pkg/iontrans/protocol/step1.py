"""
DESCRIPTION

    Step I: retrieval of the collective spin wave into the cavity by a Raman (STIRAP) transition through |e⟩.

    H = Σ_i [Ω₁(t) (|e⟩_i⟨1| + h.c.) + g_i (|e⟩_i⟨0| a + h.c.)] + Δ Σ_i |e⟩_i⟨e|
    dρ/dt = −i[H, ρ] + κ D[a]ρ + Γ Σ_i (D[|1⟩_i⟨e|] + D[|0⟩_i⟨e|])ρ

    Rates are in units of κ. The fidelity F2 = 1 − 2Γ ∫ Σ_i ⟨e_i|ρ|e_i⟩ dt is the probability bound of no spontaneous
    emission; the integral rides along with the master equation.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from ..chain import CouplingProfile, collective_coupling, enhancement_factor
from ..dynamics import PulseSchedule, TimeDependentHamiltonian, evolve_density, ramp
from ..errors import DimensionMismatchError, DurationError, InvalidSectorError
from ..statespace import (
    EXCITED,
    GROUND,
    SHELVED,
    OperatorSpec,
    SectorBasis,
    SectorConfig,
    basis_vector,
    build_operator,
    cached_sector_basis,
    dicke_state,
)
from .model import Step1Report
from .params import GeometryInputs, PreparedChain, ProtocolParams, prepare_chain

logger = logging.getLogger(__name__)


###############################################################################
# Assembly
###############################################################################
def step1_sector_config(params: ProtocolParams, n_ions: int, n_excitations: int = 1) -> SectorConfig:
    """Three-level ions and the cavity mode, holding n_excitations excitations."""
    if not 1 <= n_excitations <= n_ions:
        raise InvalidSectorError(f"a chain of {n_ions} ions cannot store {n_excitations} excitations")
    return SectorConfig(
        n_ions,
        levels_per_ion=3,
        max_ion_excitations=n_excitations,
        photon_cutoff=n_excitations,
        total_excitation_cap=n_excitations,
        max_dimension=params.max_dimension,
    )


def step1_schedule(params: ProtocolParams) -> PulseSchedule:
    """Ω₁(t) rising as sin² over the ramp duration, then flat up to the longest retrieval time."""
    return PulseSchedule(params.retrieval_time_max, {"omega1": ramp(params.omega1, 0.0, params.ramp_duration)})


def assemble_step1_system(
    coupling: CouplingProfile,
    params: ProtocolParams,
    basis: SectorBasis,
    schedule: Optional[PulseSchedule] = None,
) -> Tuple[TimeDependentHamiltonian, List[Tuple[sp.csr_matrix, float]]]:
    """Hamiltonian and jump operators of the retrieval step.

    Returns
    -------
    hamiltonian : TimeDependentHamiltonian
        The cavity and detuning terms are static, the Ω₁ term follows the schedule
    jumps : list of (operator, rate)
        a at rate κ = 1, then |1⟩_i⟨e| and |0⟩_i⟨e| at rate Γ for every ion

    Raises
    ------
    InvalidSectorError
        If the basis has no |e⟩ level or no cavity mode
    """
    if basis.config.levels_per_ion != 3:
        raise InvalidSectorError("step I needs three-level ions")
    if not basis.has_mode("photon"):
        raise InvalidSectorError("step I needs the cavity mode")
    if len(coupling.g) != basis.n_ions:
        raise DimensionMismatchError(f"{len(coupling.g)} couplings on a basis of {basis.n_ions} ions")
    schedule = schedule or step1_schedule(params)

    pump = build_operator(OperatorSpec("transition", levels=(EXCITED, SHELVED)), basis)
    cavity = build_operator(
        OperatorSpec(
            "product",
            factors=(
                OperatorSpec.weighted("transition", coupling.g, levels=(EXCITED, GROUND)),
                OperatorSpec("lower", mode="photon"),
            ),
        ),
        basis,
    )
    detuning = build_operator(OperatorSpec("level_population", levels=(EXCITED, EXCITED)), basis)
    static = cavity + cavity.getH() + params.delta_stirap * detuning
    hamiltonian = TimeDependentHamiltonian(static, [(schedule.control("omega1"), pump + pump.getH())])

    jumps = [(build_operator(OperatorSpec("lower", mode="photon"), basis), 1.0)]
    for site in range(basis.n_ions):
        for level in (SHELVED, GROUND):
            jump = build_operator(OperatorSpec("transition", site=site, levels=(level, EXCITED)), basis)
            jumps.append((jump, params.gamma))
    return hamiltonian, jumps


def dark_state(coupling: CouplingProfile, omega1: float, basis: SectorBasis) -> np.ndarray:
    """The normalised dark state G|1̲;0⟩ − Ω₁|0̲;1⟩ of the closed system, G = √(Σ g_i²)."""
    shelved = dicke_state(basis, coupling.g)
    photon = basis_vector(basis, basis.ground_label(n_photon=1))
    psi = collective_coupling(coupling) * shelved - omega1 * photon
    return psi / np.linalg.norm(psi)


def vacuum_rabi_splitting(coupling: CouplingProfile, params: ProtocolParams) -> float:
    """Spread of the single-excitation spectrum of the closed system without Ω₁, 2√(Σ g_i²) at Δ = 0."""
    basis = cached_sector_basis(step1_sector_config(params, len(coupling.g), 1))
    hamiltonian, _ = assemble_step1_system(coupling, params, basis)
    single = [i for i, label in enumerate(basis.labels) if label.total_excitations == 1]
    energies = la.eigvalsh(hamiltonian.static.toarray()[np.ix_(single, single)])
    return float(energies[-1] - energies[0])


###############################################################################
# Run
###############################################################################
def run_step1_retrieval(
    params: ProtocolParams,
    inputs: GeometryInputs,
    chain: Optional[PreparedChain] = None,
    n_excitations: int = 1,
) -> Step1Report:
    """Retrieve |n̲; 0⟩ into the cavity and return F2.

    The master equation is integrated in segments of one ramp duration until the population outside |0̲;0⟩ falls
    below the retrieval threshold.

    Raises
    ------
    DurationError
        If the threshold is not reached by the longest retrieval time
    """
    chain = chain or prepare_chain(inputs, params)
    basis = cached_sector_basis(step1_sector_config(params, chain.n_ions, n_excitations))
    schedule = step1_schedule(params)
    hamiltonian, jumps = assemble_step1_system(chain.coupling, params, basis, schedule)

    psi0 = dicke_state(basis, chain.coupling.g, n_excitations)
    rho = np.outer(psi0, psi0.conj())
    accumulate = {
        "excited": build_operator(OperatorSpec("level_population", levels=(EXCITED, EXCITED)), basis),
        "photons": build_operator(OperatorSpec("number", mode="photon"), basis),
    }
    excitations = build_operator(OperatorSpec("excitation_number"), basis)
    ground = basis.index_of(basis.ground_label())

    t = 0.0
    offsets = {name: 0.0 for name in accumulate}
    trace_drift, min_eigenvalue = 0.0, 0.0
    while True:
        stop = min(t + params.ramp_duration, params.retrieval_time_max)
        trajectory = evolve_density(
            hamiltonian, jumps, rho, [t, stop], tol=params.tol, accumulate=accumulate, accumulator_offsets=offsets
        )
        rho = trajectory.final_state
        offsets = {name: trajectory.accumulated(name) for name in accumulate}
        traces = np.trace(trajectory.states, axis1=1, axis2=2).real
        trace_drift = max(trace_drift, float(np.max(np.abs(traces - 1.0))))
        min_eigenvalue = min(min_eigenvalue, trajectory.min_eigenvalue)
        t = stop

        residual = 1.0 - rho[ground, ground].real
        if residual < params.retrieval_threshold:
            break
        if t >= params.retrieval_time_max:
            raise DurationError(
                f"retrieval not complete after t={t:g}/κ: residual excitation {residual:.2e} "
                f"above {params.retrieval_threshold:.0e}"
            )
        logger.debug("retrieval at t=%g/κ: residual %.3e", t, residual)

    excited_integral = offsets["excited"]
    fidelity = float(np.clip(1.0 - 2.0 * params.gamma * excited_integral, 0.0, 1.0))
    remaining = float(np.trace(excitations @ rho).real)
    report = Step1Report(
        n_ions=chain.n_ions,
        n_excitations=n_excitations,
        fidelity=fidelity,
        efficiency=offsets["photons"] / n_excitations,
        excited_integral=excited_integral,
        spontaneous_loss=n_excitations - offsets["photons"] - remaining,
        residual=residual,
        duration=t,
        ramp_duration=params.ramp_duration,
        collective_coupling=collective_coupling(chain.coupling),
        enhancement=enhancement_factor(chain.coupling, n_excitations),
        trace_drift=trace_drift,
        min_eigenvalue=min_eigenvalue,
        seed=chain.inputs.seed,
        realization=chain.inputs.realization,
    )
    logger.info(
        "step I, N=%d, %d excitation(s): F2=%.6f, efficiency %.4f, t=%g/κ",
        chain.n_ions,
        n_excitations,
        fidelity,
        report.efficiency,
        t,
    )
    return report


def run_multi_excitation_retrieval(
    params: ProtocolParams,
    inputs: GeometryInputs,
    n_excitations: int = 2,
    chain: Optional[PreparedChain] = None,
) -> Step1Report:
    """Retrieval of the n-excitation state |n̲⟩ ∝ Σ_{i1<...<in} g_i1...g_in |...1_i1...1_in...⟩.

    F2 is then a lower bound of the probability of no spontaneous emission.
    """
    return run_step1_retrieval(params, inputs, chain, n_excitations=n_excitations)
