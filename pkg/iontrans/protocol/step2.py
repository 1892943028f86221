"""
DESCRIPTION

    Step II: transfer of one bus phonon onto the collective spin wave by an adiabatic sweep of the laser detuning
    across the red sideband of the bus mode.

    H(t) = ω b†b + ω̃ b̃†b̃ + Δ(t) Σ_i |1⟩_i⟨1| + Ω(t) Σ_i σ^x_i [c_i + s_i (η/√N (b + b†) + η̃/√N (b̃ + b̃†))]

    with a Gaussian Ω(t) and a linear chirp Δ(t) through ω. The logical qubit |0̲;0⟩, |0̲;1⟩ is mapped onto
    |0̲;0⟩, |1̲;0⟩, where |1̲⟩ is the coupling-weighted Dicke state; the spurious mode is traced out.
"""

import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..chain import ModeTable, QuadrupoleProfile
from ..dynamics import (
    ChannelEstimate,
    PulseSchedule,
    TimeDependentHamiltonian,
    average_channel_fidelity,
    evolve_state,
    gaussian,
    input_fidelities,
    linear_chirp,
    phase_corrected,
    pulse_value,
    reconstruct_channel,
    standard_inputs,
)
from ..errors import DimensionMismatchError, InvalidSectorError
from ..statespace import (
    SHELVED,
    OperatorSpec,
    SectorBasis,
    SectorConfig,
    basis_vector,
    build_operator,
    cached_sector_basis,
    canonicalize,
    compress_collective,
    dicke_state,
    hermitian_part,
    reduced_basis,
    thermal_weights,
    traced_logical_block,
)
from .model import Step2Report
from .params import GeometryInputs, PreparedChain, ProtocolParams, prepare_chain, spurious_frequency

###############################################################################
# global constants
###############################################################################
ADIABATIC_LEAKAGE = 0.2
THERMAL_WEIGHT_FLOOR = 1e-12

logger = logging.getLogger(__name__)


###############################################################################
# Assembly
###############################################################################
def step2_sector_config(params: ProtocolParams, n_ions: int) -> SectorConfig:
    """Caps of the step-II basis.

    Without the RWA every cap of params applies. The RWA Hamiltonian conserves the excitation number, so the basis is
    cut at the largest number of excitations of an input state, which is exact.
    """
    spurious_cutoff = params.spurious_cutoff if params.eta_spurious > 0 else 0
    if not params.rwa:
        return SectorConfig(
            n_ions,
            levels_per_ion=2,
            max_ion_excitations=params.max_ion_excitations,
            bus_cutoff=params.bus_cutoff,
            spurious_cutoff=spurious_cutoff,
            total_excitation_cap=params.total_excitation_cap,
            max_dimension=params.max_dimension,
        )
    thermal = spurious_cutoff if params.nbar_spurious > 0 else 0
    cap = 1 + thermal
    return SectorConfig(
        n_ions,
        levels_per_ion=2,
        max_ion_excitations=min(params.max_ion_excitations, cap),
        bus_cutoff=min(params.bus_cutoff, cap),
        spurious_cutoff=min(spurious_cutoff, cap),
        total_excitation_cap=cap,
        max_dimension=params.max_dimension,
    )


def step2_schedule(params: ProtocolParams) -> PulseSchedule:
    """Gaussian Ω(t) centred on the chirp, Δ(t) swept linearly from ω − w to ω + w."""
    duration = params.chirp_duration
    return PulseSchedule(
        duration,
        {
            "omega": gaussian(params.omega_max, 0.5 * duration, params.pulse_width_fraction * duration),
            "delta": linear_chirp(1.0 - params.chirp_half_width, 1.0 + params.chirp_half_width),
        },
    )


def drive_operator(
    basis: SectorBasis,
    carrier: Sequence[float],
    sideband: Sequence[float],
    com_factor: float,
    spurious_factor: float,
    rwa: bool = False,
) -> sp.csr_matrix:
    """Σ_i σ^x_i [c_i + s_i (f (b + b†) + f̃ (b̃ + b̃†))], or with the RWA its excitation-conserving part
    Σ_i s_i [f (σ⁺_i b + σ⁻_i b†) + f̃ (σ⁺_i b̃ + σ⁻_i b̃†)].

    The spurious term is present when the basis carries the spurious mode.
    """
    sideband_modes = [("bus", com_factor)]
    if basis.has_mode("spurious"):
        sideband_modes.append(("spurious", spurious_factor))

    if rwa:
        op = sp.csr_matrix((basis.dimension, basis.dimension), dtype=complex)
        for mode, factor in sideband_modes:
            factors = (OperatorSpec.weighted("collective_raise", sideband), OperatorSpec("lower", mode=mode))
            spec = OperatorSpec("product", factors=factors)
            half = build_operator(spec, basis)
            op = op + factor * (half + half.getH())
        return canonicalize(op)

    op = build_operator(OperatorSpec.weighted("collective_x", carrier), basis)
    for mode, factor in sideband_modes:
        spec = OperatorSpec(
            "product", factors=(OperatorSpec.weighted("collective_x", sideband), OperatorSpec("quadrature", mode=mode))
        )
        op = op + factor * build_operator(spec, basis)
    return canonicalize(op)


def step2_hamiltonian(
    quad: QuadrupoleProfile,
    modes: ModeTable,
    params: ProtocolParams,
    basis: SectorBasis,
    schedule: Optional[PulseSchedule] = None,
) -> TimeDependentHamiltonian:
    """The step-II Hamiltonian as a static part plus the Δ(t) and Ω(t) terms.

    Raises
    ------
    InvalidSectorError
        If the basis lacks the bus mode, or the spurious mode while η̃ > 0
    """
    if not basis.has_mode("bus"):
        raise InvalidSectorError("the step II basis needs the bus mode")
    if quad.eta_spurious > 0 and not basis.has_mode("spurious"):
        raise InvalidSectorError("the step II basis needs the spurious mode when η̃ > 0")
    if basis.n_ions != quad.n_ions:
        raise DimensionMismatchError(f"weights for {quad.n_ions} ions on a basis of {basis.n_ions} ions")
    schedule = schedule or step2_schedule(params)

    static = modes.frequencies[0] * build_operator(OperatorSpec("number", mode="bus"), basis)
    if basis.has_mode("spurious"):
        static = static + spurious_frequency(modes) * build_operator(OperatorSpec("number", mode="spurious"), basis)
    population = build_operator(OperatorSpec("level_population", levels=(SHELVED, SHELVED)), basis)
    drive = drive_operator(
        basis, quad.carrier_weights, quad.sideband_weights, quad.com_factor, quad.spurious_factor, params.rwa
    )
    terms = [(schedule.control("delta"), population), (schedule.control("omega"), drive)]
    return TimeDependentHamiltonian(static, terms)


def assemble_step2_hamiltonian(
    quad: QuadrupoleProfile,
    modes: ModeTable,
    params: ProtocolParams,
    basis: SectorBasis,
    t: float,
    schedule: Optional[PulseSchedule] = None,
) -> sp.csr_matrix:
    """H(t) of step II.

    Raises
    ------
    PulseDomainError
        If t lies outside the chirp
    """
    schedule = schedule or step2_schedule(params)
    pulse_value(schedule, t)
    return step2_hamiltonian(quad, modes, params, basis, schedule)(t)


###############################################################################
# Logical channel
###############################################################################
def thermal_inputs(params: ProtocolParams, basis: SectorBasis) -> List[Tuple[int, float]]:
    """(n_spurious, probability) of the thermal spurious populations carried by the inputs."""
    if not basis.has_mode("spurious") or params.nbar_spurious == 0:
        return [(0, 1.0)]
    cutoff = min(basis.config.spurious_cutoff, basis.config.cap - 1)
    weights = thermal_weights(params.nbar_spurious, cutoff)
    kept = [(k, p) for k, p in enumerate(weights) if p > THERMAL_WEIGHT_FLOOR]
    total = sum(p for _, p in kept)
    return [(k, p / total) for k, p in kept]


def logical_channel(
    final: np.ndarray, probabilities: Sequence[float], basis: SectorBasis, targets: np.ndarray
) -> ChannelEstimate:
    """Qubit channel from evolved logical inputs.

    Columns 2j and 2j+1 of final are the evolved |0⟩ and |1⟩ inputs of the j-th spurious population, which has
    probability probabilities[j]. Superposition inputs follow by linearity; the spurious mode is traced out and
    the result is read out on the two columns of targets.
    """
    outputs = []
    for coefficients in standard_inputs(2):
        block = np.zeros((2, 2), dtype=complex)
        for j, probability in enumerate(probabilities):
            psi = coefficients[0] * final[:, 2 * j] + coefficients[1] * final[:, 2 * j + 1]
            block += probability * traced_logical_block(psi, basis, targets)
        outputs.append(block)
    return reconstruct_channel(outputs)


def refined_params(params: ProtocolParams) -> ProtocolParams:
    """The parameters of the convergence rerun: every sector cap one higher (a dropped spurious mode stays dropped)."""
    return replace(
        params,
        total_excitation_cap=params.total_excitation_cap + 1,
        bus_cutoff=params.bus_cutoff + 1,
        spurious_cutoff=params.spurious_cutoff + 1 if params.spurious_cutoff else 0,
        convergence_check=False,
    )


def use_compression(params: ProtocolParams, n_ions: int) -> bool:
    if params.compression == "auto":
        return n_ions >= params.compression_min_ions
    return params.compression == "on"


def step2_method(params: ProtocolParams) -> str:
    if params.step2_method != "auto":
        return params.step2_method
    return "magnus" if params.rwa else "rk"


###############################################################################
# Run
###############################################################################
def run_step2(params: ProtocolParams, inputs: GeometryInputs, chain: Optional[PreparedChain] = None) -> Step2Report:
    """Evolve the logical inputs through the chirp and return F1, the phase-corrected average fidelity.

    Parameters
    ----------
    params : ProtocolParams
        The protocol parameters
    inputs : GeometryInputs
        The chain realization
    chain : PreparedChain, optional
        A chain already prepared from inputs and params (shared by the steps of a joint run)

    Returns
    -------
    Step2Report
    """
    chain = chain or prepare_chain(inputs, params)
    quad = chain.quadrupole
    basis = cached_sector_basis(step2_sector_config(params, chain.n_ions))
    schedule = step2_schedule(params)
    hamiltonian = step2_hamiltonian(quad, chain.modes, params, basis, schedule)

    populations = thermal_inputs(params, basis)
    columns = []
    for k, _ in populations:
        columns.append(basis_vector(basis, basis.ground_label(n_bus=0, n_spurious=k)))
        columns.append(basis_vector(basis, basis.ground_label(n_bus=1, n_spurious=k)))
    block = np.column_stack(columns)

    compressed = use_compression(params, chain.n_ions)
    if compressed:
        subspace = compress_collective(
            basis,
            [quad.carrier_weights, quad.sideband_weights],
            depth=params.compression_depth,
            max_rank=params.compression_rank,
        )
        propagated = hamiltonian.transformed(lambda op: hermitian_part(subspace.compress(op)))
        start = subspace.restrict(block)
    else:
        propagated, start = hamiltonian, block

    method = step2_method(params)
    trajectory = evolve_state(propagated, start, [0.0, schedule.duration], tol=params.tol, method=method)
    final = subspace.lift(trajectory.final_state) if compressed else trajectory.final_state

    reduced = reduced_basis(basis)
    targets = np.column_stack([basis_vector(reduced, reduced.ground_label()), dicke_state(reduced, chain.coupling.g)])
    channel = logical_channel(final, [p for _, p in populations], basis, targets)

    fidelity_uncorrected = average_channel_fidelity(channel)
    corrected, phases = phase_corrected(channel)
    fidelity = average_channel_fidelity(corrected)
    adiabatic = channel.leakage <= ADIABATIC_LEAKAGE
    if not adiabatic:
        logger.warning(
            "step II leakage %.3f exceeds %.1f: the sweep is not adiabatic", channel.leakage, ADIABATIC_LEAKAGE
        )

    convergence_delta = None
    if params.convergence_check:
        convergence_delta = abs(run_step2(refined_params(params), inputs, chain).fidelity - fidelity)

    logger.info(
        "step II, N=%d: F1=%.6f (uncorrected %.6f), leakage %.2e, dimension %d",
        chain.n_ions,
        fidelity,
        fidelity_uncorrected,
        channel.leakage,
        propagated.dimension,
    )
    return Step2Report(
        n_ions=chain.n_ions,
        fidelity=fidelity,
        fidelity_uncorrected=fidelity_uncorrected,
        leakage=channel.leakage,
        overlaps=tuple(float(v) for v in input_fidelities(corrected)),
        phase_correction=float(phases[1]),
        adiabatic=adiabatic,
        leakage_warning=channel.leakage_warning,
        duration=schedule.duration,
        dimension=propagated.dimension,
        compressed=compressed,
        method=trajectory.method,
        norm_drift=trajectory.max_drift,
        hermiticity_defect=hamiltonian.hermiticity_defect(),
        phases=tuple(float(p) for p in chain.coupling.phases),
        seed=chain.inputs.seed,
        realization=chain.inputs.realization,
        convergence_delta=convergence_delta,
        channel=corrected,
    )
