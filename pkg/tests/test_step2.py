from dataclasses import replace

import numpy as np
import pytest

from iontrans.dynamics import average_channel_fidelity
from iontrans.errors import InvalidSectorError, PulseDomainError
from iontrans.protocol import (
    GeometryInputs,
    assemble_step2_hamiltonian,
    drive_operator,
    logical_channel,
    prepare_chain,
    run_step2,
    step2_hamiltonian,
    step2_schedule,
    step2_sector_config,
    thermal_inputs,
)
from iontrans.protocol.step2 import refined_params, step2_method, use_compression
from iontrans.statespace import (
    SHELVED,
    BasisLabel,
    OperatorSpec,
    SectorConfig,
    basis_vector,
    build_operator,
    build_sector_basis,
    commutator_norm,
    dicke_state,
    reduced_basis,
)

WEIGHTS = np.array([0.6, -0.8])


@pytest.fixture
def rwa_params(params):
    """Single-excitation RWA dynamics without the spurious mode, slow enough to be adiabatic."""
    return replace(params, rwa=True, eta_spurious=0.0, chirp_duration=1e5)


###############################################################################
# Assembly
###############################################################################
def test_rwa_sector_is_cut_at_one_excitation(rwa_params):
    cfg = step2_sector_config(rwa_params, 2)
    assert (cfg.total_excitation_cap, cfg.bus_cutoff, cfg.spurious_cutoff) == (1, 1, 0)
    assert build_sector_basis(cfg).dimension == 4


def test_thermal_rwa_sector_keeps_room_for_the_spurious_phonons(params):
    cfg = step2_sector_config(replace(params, rwa=True, nbar_spurious=0.5), 2)
    assert cfg.total_excitation_cap == 1 + params.spurious_cutoff
    assert cfg.spurious_cutoff == params.spurious_cutoff


def test_full_sector_follows_the_caps(small_params):
    cfg = step2_sector_config(small_params, 4)
    assert cfg.max_ion_excitations == 2
    assert cfg.total_excitation_cap == 2
    assert (cfg.bus_cutoff, cfg.spurious_cutoff) == (2, 1)


@pytest.fixture
def drive_basis():
    cfg = SectorConfig(2, max_ion_excitations=2, bus_cutoff=2, spurious_cutoff=1, total_excitation_cap=3)
    return build_sector_basis(cfg)


def test_rwa_drive_conserves_excitations(drive_basis):
    number = build_operator(OperatorSpec("excitation_number"), drive_basis)
    rwa = drive_operator(drive_basis, [0.8, 0.6], WEIGHTS, 0.07, 0.28, rwa=True)
    full = drive_operator(drive_basis, [0.8, 0.6], WEIGHTS, 0.07, 0.28)
    assert commutator_norm(rwa, number) < 1e-15
    assert commutator_norm(full, number) > 0.1


def test_drive_matrix_elements(drive_basis):
    full = drive_operator(drive_basis, [0.8, 0.6], WEIGHTS, 0.07, 0.28)
    ground = drive_basis.index_of(drive_basis.ground_label())
    first = drive_basis.index_of(BasisLabel((SHELVED, 0)))
    first_with_phonon = drive_basis.index_of(BasisLabel((SHELVED, 0), 1))
    second_with_spurious = drive_basis.index_of(BasisLabel((0, SHELVED), 0, 1))
    assert full[first, ground] == pytest.approx(0.8)
    assert full[first_with_phonon, ground] == pytest.approx(0.6 * 0.07)
    assert full[second_with_spurious, ground] == pytest.approx(-0.8 * 0.28)

    rwa = drive_operator(drive_basis, [0.8, 0.6], WEIGHTS, 0.07, 0.28, rwa=True)
    phonon = drive_basis.index_of(drive_basis.ground_label(n_bus=1))
    assert rwa[first, phonon] == pytest.approx(0.6 * 0.07)
    assert rwa[first, ground] == 0.0


def test_hamiltonian_at_the_centre_of_the_chirp(small_params, two_ions):
    chain = prepare_chain(two_ions, small_params)
    basis = build_sector_basis(step2_sector_config(small_params, 2))
    middle = 0.5 * small_params.chirp_duration
    h = assemble_step2_hamiltonian(chain.quadrupole, chain.modes, small_params, basis, middle)

    phonon = basis.index_of(basis.ground_label(n_bus=1))
    spurious = basis.index_of(basis.ground_label(n_spurious=1))
    excited = basis.index_of(BasisLabel((SHELVED, 0)))
    assert h[phonon, phonon] == pytest.approx(1.0)
    assert h[spurious, spurious] == pytest.approx(np.sqrt(3.0), rel=1e-8)
    assert h[excited, excited] == pytest.approx(1.0)
    ground = basis.index_of(basis.ground_label())
    assert h[excited, ground] == pytest.approx(small_params.omega_max * chain.quadrupole.carrier_weights[0])


@pytest.mark.parametrize("after_the_end", [False, True])
def test_hamiltonian_outside_the_chirp(small_params, two_ions, after_the_end):
    t = small_params.chirp_duration + 1.0 if after_the_end else -1.0
    chain = prepare_chain(two_ions, small_params)
    basis = build_sector_basis(step2_sector_config(small_params, 2))
    with pytest.raises(PulseDomainError):
        assemble_step2_hamiltonian(chain.quadrupole, chain.modes, small_params, basis, t)


def test_hamiltonian_needs_its_modes(params, two_ions):
    chain = prepare_chain(two_ions, params)
    with pytest.raises(InvalidSectorError):
        step2_hamiltonian(chain.quadrupole, chain.modes, params, build_sector_basis(SectorConfig(2, spurious_cutoff=1)))
    with pytest.raises(InvalidSectorError):
        step2_hamiltonian(chain.quadrupole, chain.modes, params, build_sector_basis(SectorConfig(2, bus_cutoff=1)))


def test_schedule(params):
    sched = step2_schedule(params)
    assert sched.duration == params.chirp_duration
    assert sched.control("delta")(0.0) == pytest.approx(1 - params.chirp_half_width)
    assert sched.control("delta")(sched.duration) == pytest.approx(1 + params.chirp_half_width)
    assert sched.control("omega")(0.5 * sched.duration) == pytest.approx(params.omega_max)


###############################################################################
# Logical channel
###############################################################################
def test_thermal_inputs(params):
    basis = build_sector_basis(SectorConfig(2, bus_cutoff=1, spurious_cutoff=3, total_excitation_cap=4))
    assert thermal_inputs(params, basis) == [(0, 1.0)]
    populations = thermal_inputs(replace(params, nbar_spurious=0.5), basis)
    assert [k for k, _ in populations] == [0, 1, 2, 3]
    assert sum(p for _, p in populations) == pytest.approx(1.0)
    assert populations[1][1] / populations[0][1] == pytest.approx(1 / 3)


@pytest.mark.parametrize("phase, expected", [(0.0, 1.0), (np.pi, 0.8)])
def test_logical_channel_traces_out_the_spurious_mode(phase, expected):
    basis = build_sector_basis(SectorConfig(2, bus_cutoff=1, spurious_cutoff=1, total_excitation_cap=2))
    reduced = reduced_basis(basis)
    targets = np.column_stack([basis_vector(reduced, reduced.ground_label()), dicke_state(reduced, WEIGHTS)])
    final = np.column_stack(
        [
            basis_vector(basis, basis.ground_label()),
            dicke_state(basis, WEIGHTS),
            basis_vector(basis, basis.ground_label(n_spurious=1)),
            np.exp(1j * phase) * dicke_state(basis, WEIGHTS, n_spurious=1),
        ]
    )
    channel = logical_channel(final, [0.7, 0.3], basis, targets)
    # the coherence keeps 0.7 + 0.3 e^{iφ}
    assert average_channel_fidelity(channel) == pytest.approx(expected)
    assert channel.leakage == pytest.approx(0.0, abs=1e-15)


def test_method_and_compression_choices(params):
    assert step2_method(params) == "rk"
    assert step2_method(replace(params, rwa=True)) == "magnus"
    assert step2_method(replace(params, step2_method="magnus")) == "magnus"
    assert not use_compression(params, 30)
    assert use_compression(params, 31)
    assert use_compression(replace(params, compression="on"), 2)
    assert not use_compression(replace(params, compression="off"), 60)


###############################################################################
# Runs
###############################################################################
def test_adiabatic_transfer(rwa_params, two_ions):
    report = run_step2(rwa_params, two_ions)
    assert report.fidelity > 0.999
    assert report.fidelity >= report.fidelity_uncorrected - 1e-12
    assert report.adiabatic and not report.leakage_warning
    assert report.dimension == 4
    assert report.method == "magnus"
    assert report.norm_drift < 1e-7
    assert report.overlaps[0] == pytest.approx(1.0, abs=1e-6)
    assert min(report.overlaps) > 0.99
    assert report.phases == pytest.approx((0.3, 1.1))


def test_exact_rwa_sector_needs_no_refinement(rwa_params, two_ions):
    report = run_step2(replace(rwa_params, convergence_check=True, chirp_duration=2e3), two_ions)
    assert report.convergence_delta == pytest.approx(0.0, abs=1e-12)


def test_short_chirp_is_not_adiabatic(rwa_params, two_ions):
    report = run_step2(replace(rwa_params, chirp_duration=10.0), two_ions)
    assert not report.adiabatic
    assert report.fidelity < 0.9


def test_full_hamiltonian_bookkeeping(small_params, two_ions):
    report = run_step2(replace(small_params, chirp_duration=200.0), two_ions)
    assert report.method == "rk"
    assert 0.0 <= report.fidelity <= 1.0
    assert report.hermiticity_defect < 1e-14
    assert report.norm_drift < 1e-6
    assert len(report.overlaps) == 4
    assert report.channel.is_completely_positive()
    assert not report.compressed


def test_compression_reproduces_the_full_run(small_params):
    inputs = GeometryInputs(3, phase_mode="explicit", phases=(0.3, 1.1, 2.0))
    params = replace(small_params, chirp_duration=200.0, compression_depth=20)
    full = run_step2(replace(params, compression="off"), inputs)
    compressed = run_step2(replace(params, compression="on"), inputs)
    assert compressed.compressed
    assert compressed.dimension <= full.dimension
    assert compressed.fidelity == pytest.approx(full.fidelity, abs=1e-6)
    assert compressed.leakage == pytest.approx(full.leakage, abs=1e-6)


@pytest.mark.slow
def test_spurious_temperature_barely_matters(params, two_ions):
    cold = replace(params, rwa=True, chirp_duration=1e5)
    warm = replace(cold, nbar_spurious=0.5)
    assert run_step2(warm, two_ions).fidelity == pytest.approx(run_step2(cold, two_ions).fidelity, abs=5e-3)


def test_refined_sector_is_larger(small_params):
    refined = refined_params(small_params)
    assert (refined.total_excitation_cap, refined.bus_cutoff, refined.spurious_cutoff) == (3, 3, 2)
    assert not refined.convergence_check
    coarse = build_sector_basis(step2_sector_config(small_params, 3))
    fine = build_sector_basis(step2_sector_config(refined, 3))
    assert fine.dimension > coarse.dimension
    assert refined_params(replace(small_params, spurious_cutoff=0)).spurious_cutoff == 0


@pytest.mark.parametrize("phases", [(0.3, 1.1), (0.7, 2.5), (1.9, 0.4)])
def test_locked_pattern_transfers_best(rwa_params, phases):
    fidelities = [
        run_step2(rwa_params, GeometryInputs(2, phase_mode="explicit", phases=phases, pattern_phase=offset)).fidelity
        for offset in (0.0, np.pi / 4, np.pi / 2)
    ]
    assert fidelities[0] > 0.999
    assert fidelities[0] >= fidelities[1] >= fidelities[2]


def test_pattern_offset_lowers_the_ensemble_fidelity(rwa_params):
    ensemble = [(0.3, 1.1), (0.7, 2.5), (1.9, 0.4), (2.8, 5.0)]

    def mean_fidelity(offset):
        inputs = [GeometryInputs(2, phase_mode="explicit", phases=p, pattern_phase=offset) for p in ensemble]
        return np.mean([run_step2(rwa_params, i).fidelity for i in inputs])

    locked, tilted, crossed = (mean_fidelity(offset) for offset in (0.0, np.pi / 4, np.pi / 2))
    assert locked >= tilted >= crossed
    assert locked - crossed > 0.1
