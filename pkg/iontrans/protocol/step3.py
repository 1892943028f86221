"""
DESCRIPTION

    Step III: transfer of the excitation of one addressed ion onto the bus phonon by a red-sideband π pulse.

    The addressed ion sees the step-II drive structure with a constant amplitude Ω_max,

    H = ω b†b + ω̃ b̃†b̃ + (ω + δ) |1⟩⟨1| + Ω_max σ^x [c_i + s_i (η/√N (b + b†) + η̃/√N (b̃ + b̃†))],

    where δ compensates the carrier Stark shift. The pulse lasts π/(2 g₃) with g₃ = Ω_max |s_i| η/√N.
"""

import logging
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from ..dynamics import TimeDependentHamiltonian, average_channel_fidelity, evolve_state, phase_corrected
from ..errors import CalibrationError, GeometryError
from ..statespace import (
    SHELVED,
    BasisLabel,
    OperatorSpec,
    SectorBasis,
    SectorConfig,
    basis_vector,
    build_operator,
    cached_sector_basis,
    reduced_basis,
    traced_logical_block,
)
from .model import Step3Report
from .params import GeometryInputs, PreparedChain, ProtocolParams, prepare_chain
from .step2 import drive_operator, logical_channel, thermal_inputs

###############################################################################
# global constants
###############################################################################
WEAK_COUPLING = 0.1
MIN_GRID_POINTS = 41
MAX_GRID_POINTS = 20001
GRID_POINTS_PER_RATE = 4
OFFSET_TOLERANCE = 1e-10

logger = logging.getLogger(__name__)


###############################################################################
# Assembly
###############################################################################
def step3_sector_config(params: ProtocolParams) -> SectorConfig:
    spurious_cutoff = params.spurious_cutoff if params.eta_spurious > 0 else 0
    return SectorConfig(
        1,
        levels_per_ion=2,
        max_ion_excitations=1,
        bus_cutoff=params.bus_cutoff,
        spurious_cutoff=spurious_cutoff,
        total_excitation_cap=params.total_excitation_cap,
        max_dimension=params.max_dimension,
    )


def select_addressed_ion(chain: PreparedChain, addressed_ion: Optional[int] = None) -> int:
    """The requested ion, else the one of the geometry inputs, else the ion with the largest |s_i|."""
    if addressed_ion is None:
        addressed_ion = chain.inputs.addressed_ion
    if addressed_ion is None:
        return int(np.argmax(np.abs(chain.quadrupole.sideband_weights)))
    if not 0 <= addressed_ion < chain.n_ions:
        raise GeometryError(f"addressed ion {addressed_ion} is outside the chain of {chain.n_ions}")
    return addressed_ion


def step3_rabi_rate(chain: PreparedChain, params: ProtocolParams, ion: int) -> float:
    """Sideband Rabi rate g₃ = Ω_max |s_i| η/√N."""
    return params.omega_max * abs(chain.quadrupole.sideband_weights[ion]) * chain.quadrupole.com_factor


def step3_duration(chain: PreparedChain, params: ProtocolParams, ion: int) -> float:
    rate = step3_rabi_rate(chain, params, ion)
    if rate == 0.0:
        raise GeometryError(f"ion {ion} does not couple to the red sideband")
    return 0.5 * np.pi / rate


def step3_hamiltonian(
    chain: PreparedChain, params: ProtocolParams, ion: int, offset: float, basis: SectorBasis
) -> TimeDependentHamiltonian:
    quad = chain.quadrupole
    static = chain.modes.frequencies[0] * build_operator(OperatorSpec("number", mode="bus"), basis)
    if basis.has_mode("spurious"):
        static = static + chain.spurious_frequency * build_operator(OperatorSpec("number", mode="spurious"), basis)
    population = build_operator(OperatorSpec("level_population", levels=(SHELVED, SHELVED)), basis)
    static = static + (1.0 + offset) * population
    drive = drive_operator(
        basis,
        [quad.carrier_weights[ion]],
        [quad.sideband_weights[ion]],
        quad.com_factor,
        quad.spurious_factor,
        params.rwa,
    )
    return TimeDependentHamiltonian(static + params.omega_max * drive)


def _evolve_pulse(chain: PreparedChain, params: ProtocolParams, ion: int, offset: float):
    """Evolved |0;0;k⟩ and |1;0;k⟩ for every thermal spurious population k, as pairs of columns."""
    basis = cached_sector_basis(step3_sector_config(params))
    populations = thermal_inputs(params, basis)
    columns = []
    for k, _ in populations:
        columns.append(basis_vector(basis, BasisLabel((0,), 0, k)))
        columns.append(basis_vector(basis, BasisLabel((SHELVED,), 0, k)))
    hamiltonian = step3_hamiltonian(chain, params, ion, offset, basis)
    duration = step3_duration(chain, params, ion)
    trajectory = evolve_state(hamiltonian, np.column_stack(columns), [0.0, duration], tol=params.tol)
    return trajectory.final_state, [p for _, p in populations], basis


def _targets(basis: SectorBasis) -> np.ndarray:
    reduced = reduced_basis(basis)
    return np.column_stack(
        [basis_vector(reduced, reduced.ground_label()), basis_vector(reduced, reduced.ground_label(n_bus=1))]
    )


def transfer_fidelity(chain: PreparedChain, params: ProtocolParams, ion: int, offset: float) -> float:
    """F0 = ⟨0;1| Tr_spurious ρ(T) |0;1⟩ for the input |1_i;0⟩."""
    final, probabilities, basis = _evolve_pulse(chain, params, ion, offset)
    target = _targets(basis)[:, 1:]
    value = sum(
        p * traced_logical_block(final[:, 2 * j + 1], basis, target)[0, 0].real for j, p in enumerate(probabilities)
    )
    return float(value)


###############################################################################
# Stark compensation
###############################################################################
def calibrate_stark_shift(params: ProtocolParams, chain: PreparedChain, addressed_ion: Optional[int] = None) -> float:
    """Laser detuning offset maximising F0 within ±C·Ω²/ω.

    A grid fine enough to resolve the sideband resonance brackets the maximum, which bounded Brent then refines.

    Raises
    ------
    CalibrationError
        If the best grid point lies on the edge of the interval or the refinement fails
    """
    ion = select_addressed_ion(chain, addressed_ion)
    bound = params.stark_bound
    rate = 0.5 * np.pi / step3_duration(chain, params, ion)
    n_points = int(np.clip(np.ceil(2 * bound * GRID_POINTS_PER_RATE / rate) + 1, MIN_GRID_POINTS, MAX_GRID_POINTS))
    n_points += 1 - n_points % 2
    grid = np.linspace(-bound, bound, n_points)

    def loss(offset):
        return -transfer_fidelity(chain, params, ion, offset)

    values = np.array([loss(offset) for offset in grid])
    best = int(np.argmin(values))
    if best in (0, n_points - 1):
        raise CalibrationError(f"the best Stark offset lies on the edge of [{-bound:.3e}, {bound:.3e}]")
    result = minimize_scalar(
        loss, bounds=(grid[best - 1], grid[best + 1]), method="bounded", options={"xatol": OFFSET_TOLERANCE}
    )
    if not result.success:
        raise CalibrationError(f"Stark offset refinement failed: {result.message}")
    offset = float(result.x) if result.fun <= values[best] else float(grid[best])
    logger.debug("Stark offset of ion %d: %.6e (F0=%.8f)", ion, offset, -min(result.fun, values[best]))
    return offset


###############################################################################
# Run
###############################################################################
def run_step3(
    params: ProtocolParams,
    inputs: GeometryInputs,
    addressed_ion: Optional[int] = None,
    chain: Optional[PreparedChain] = None,
    offset: Optional[float] = None,
) -> Step3Report:
    """Transfer |1_i;0⟩ → |0;1⟩ and return F0.

    Parameters
    ----------
    addressed_ion : int, optional
        The addressed ion; the one with the largest |s_i| when absent
    offset : float, optional
        Stark offset to use; calibrated (or zero when params.calibrate_stark is off) when absent
    """
    chain = chain or prepare_chain(inputs, params)
    ion = select_addressed_ion(chain, addressed_ion)
    sideband = float(chain.quadrupole.sideband_weights[ion])
    weak = abs(sideband) < WEAK_COUPLING
    if weak:
        logger.warning("addressed ion %d couples weakly to the sideband (|s|=%.3f)", ion, abs(sideband))

    calibrated = offset is not None or params.calibrate_stark
    if offset is None:
        offset = calibrate_stark_shift(params, chain, ion) if params.calibrate_stark else 0.0

    final, probabilities, basis = _evolve_pulse(chain, params, ion, offset)
    targets = _targets(basis)
    fidelity = sum(
        p * traced_logical_block(final[:, 2 * j + 1], basis, targets[:, 1:])[0, 0].real
        for j, p in enumerate(probabilities)
    )
    channel = logical_channel(final, probabilities, basis, targets)
    corrected, _ = phase_corrected(channel)
    channel_fidelity = average_channel_fidelity(corrected)

    logger.info("step III, N=%d, ion %d: F0=%.6f, offset %.3e", chain.n_ions, ion, fidelity, offset)
    return Step3Report(
        n_ions=chain.n_ions,
        fidelity=float(fidelity),
        channel_fidelity=channel_fidelity,
        offset=offset,
        calibrated=calibrated,
        addressed_ion=ion,
        sideband_weight=sideband,
        weak_coupling=weak,
        rabi_rate=step3_rabi_rate(chain, params, ion),
        duration=step3_duration(chain, params, ion),
        leakage=channel.leakage,
        seed=chain.inputs.seed,
        realization=chain.inputs.realization,
        channel=corrected,
    )
