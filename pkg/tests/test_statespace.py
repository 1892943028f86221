from itertools import combinations

import numpy as np
import pytest
import scipy.sparse as sp

from iontrans.dynamics import TimeDependentHamiltonian, evolve_state
from iontrans.errors import BasisBudgetError, DimensionMismatchError, InvalidSectorError, OperatorSpecError
from iontrans.statespace import (
    SHELVED,
    BasisLabel,
    OperatorSpec,
    SectorConfig,
    basis_vector,
    build_operator,
    build_sector_basis,
    commutator_norm,
    compress_collective,
    dicke_state,
    dump_operator,
    expectation,
    hermiticity_defect,
    load_operator,
    partial_trace_spurious,
    reduced_basis,
    sector_dimension,
    thermal_weights,
    traced_logical_block,
)


def label_vector(basis, amplitudes):
    psi = np.zeros(basis.dimension, dtype=complex)
    for label, amplitude in amplitudes.items():
        psi[basis.index_of(label)] = amplitude
    return psi


###############################################################################
# Basis
###############################################################################
@pytest.mark.parametrize(
    "cfg, expected",
    [
        (SectorConfig(1, bus_cutoff=1, spurious_cutoff=1, total_excitation_cap=2), 7),
        (SectorConfig(2), 3),
        (SectorConfig(40, max_ion_excitations=2, bus_cutoff=2, spurious_cutoff=2, total_excitation_cap=2), 906),
    ],
)
def test_basis_counts(cfg, expected):
    basis = build_sector_basis(cfg)
    assert basis.dimension == expected == sector_dimension(cfg)
    assert len(set(basis.labels)) == expected
    assert basis.labels == sorted(basis.labels)
    assert all(label.total_excitations <= cfg.cap for label in basis.labels)


def test_three_level_basis():
    basis = build_sector_basis(SectorConfig(2, levels_per_ion=3, photon_cutoff=1, total_excitation_cap=1))
    # |00;0⟩, |00;1⟩ and the four single-ion excitations to |1⟩ or |e⟩
    assert basis.dimension == 6
    assert basis.has_mode("photon") and not basis.has_mode("bus")


def test_budget_is_checked_before_enumeration():
    cfg = SectorConfig(
        40, max_ion_excitations=2, bus_cutoff=2, spurious_cutoff=2, total_excitation_cap=2, max_dimension=100
    )
    with pytest.raises(BasisBudgetError) as info:
        build_sector_basis(cfg)
    assert info.value.dimension == 906


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_ions=0), dict(n_ions=2, levels_per_ion=4), dict(n_ions=2, max_ion_excitations=2, total_excitation_cap=1)],
)
def test_invalid_sector(kwargs):
    with pytest.raises(InvalidSectorError):
        SectorConfig(**kwargs)


###############################################################################
# Operators
###############################################################################
def test_ladder_elements():
    basis = build_sector_basis(SectorConfig(1, bus_cutoff=2))
    raising = build_operator(OperatorSpec("raise", mode="bus"), basis)
    lowering = build_operator(OperatorSpec("lower", mode="bus"), basis)
    ground = (0,)
    n0, n1, n2 = (basis.index_of(BasisLabel(ground, n)) for n in range(3))
    assert raising[n1, n0] == pytest.approx(1.0)
    assert raising[n2, n1] == pytest.approx(np.sqrt(2.0))
    assert lowering[n1, n2] == pytest.approx(np.sqrt(2.0))
    assert abs(raising - lowering.getH()).max() == 0.0


def test_commutator_of_the_ladder_on_the_interior():
    basis = build_sector_basis(SectorConfig(1, bus_cutoff=4))
    b = build_operator(OperatorSpec("lower", mode="bus"), basis).toarray()
    bd = build_operator(OperatorSpec("raise", mode="bus"), basis).toarray()
    interior = [i for i, label in enumerate(basis.labels) if label.n_bus < 4]
    comm = (b @ bd - bd @ b)[np.ix_(interior, interior)]
    np.testing.assert_allclose(comm, np.eye(len(interior)), atol=1e-14)


def test_products_truncate_after_composing():
    basis = build_sector_basis(SectorConfig(1, bus_cutoff=2))
    product = build_operator(
        OperatorSpec("product", factors=(OperatorSpec("lower", mode="bus"), OperatorSpec("raise", mode="bus"))), basis
    )
    top = basis.index_of(BasisLabel((0,), 2))
    # b b† on the top occupation leaves the space in between but comes back
    assert product[top, top] == pytest.approx(3.0)
    matrix_product = build_operator(OperatorSpec("lower", mode="bus"), basis) @ build_operator(
        OperatorSpec("raise", mode="bus"), basis
    )
    assert matrix_product[top, top] == 0.0


def test_weighted_collective_raising_on_the_ground_state():
    weights = np.array([0.5, -1.0, 2.0])
    basis = build_sector_basis(SectorConfig(3))
    op = build_operator(OperatorSpec.weighted("collective_raise", weights), basis)
    image = op @ basis_vector(basis, basis.ground_label())
    for site, weight in enumerate(weights):
        pattern = tuple(SHELVED if i == site else 0 for i in range(3))
        assert image[basis.index_of(BasisLabel(pattern))] == pytest.approx(weight)
    assert np.linalg.norm(image) == pytest.approx(np.sqrt(np.sum(weights**2)))


def test_single_site_pauli_elements():
    basis = build_sector_basis(SectorConfig(2))
    sigma_plus = build_operator(OperatorSpec("sigma_plus", site=1), basis)
    ground = basis.index_of(BasisLabel((0, 0)))
    excited = basis.index_of(BasisLabel((0, SHELVED)))
    assert sigma_plus[excited, ground] == 1.0
    assert sigma_plus.nnz == 1


@pytest.mark.parametrize(
    "spec",
    [
        OperatorSpec.weighted("collective_x", [0.3, -0.7, 1.0]),
        OperatorSpec("quadrature", mode="bus"),
        OperatorSpec("number", mode="spurious"),
        OperatorSpec("level_population", levels=(SHELVED, SHELVED)),
        OperatorSpec(
            "product",
            factors=(OperatorSpec.weighted("collective_x", [0.3, -0.7, 1.0]), OperatorSpec("quadrature", mode="bus")),
        ),
    ],
)
def test_hermitian_specs_build_hermitian_matrices(spec):
    basis = build_sector_basis(
        SectorConfig(3, max_ion_excitations=2, bus_cutoff=2, spurious_cutoff=1, total_excitation_cap=3)
    )
    assert hermiticity_defect(build_operator(spec, basis)) < 1e-15


@pytest.mark.parametrize(
    "spec",
    [
        OperatorSpec("no_such_kind"),
        OperatorSpec("sigma_plus", site=5),
        OperatorSpec("lower", mode="photon"),
        OperatorSpec.weighted("collective_x", [1.0, 1.0]),
        OperatorSpec("transition", levels=(2, 0)),
        OperatorSpec("product"),
    ],
)
def test_invalid_operator_specs(spec):
    basis = build_sector_basis(SectorConfig(3, bus_cutoff=1))
    with pytest.raises(OperatorSpecError):
        build_operator(spec, basis)


def test_commutator_shapes_must_match():
    with pytest.raises(DimensionMismatchError):
        commutator_norm(sp.identity(2, format="csr"), sp.identity(3, format="csr"))


def test_operator_dump(tmp_path):
    basis = build_sector_basis(SectorConfig(2, bus_cutoff=2, total_excitation_cap=2))
    op = build_operator(
        OperatorSpec("product", factors=(OperatorSpec("sigma_plus", site=0), OperatorSpec("lower", mode="bus"))), basis
    )
    dump_operator(op, tmp_path / "op.txt")
    lines = (tmp_path / "op.txt").read_text().splitlines()
    assert lines[0] == str(basis.dimension)
    assert len(lines) == op.nnz + 1
    assert abs(load_operator(tmp_path / "op.txt") - op).max() == 0.0


###############################################################################
# States and measurements
###############################################################################
def test_expectation_of_identity_and_projector():
    basis = build_sector_basis(SectorConfig(2, levels_per_ion=3))
    label = BasisLabel((2, 0))
    other = BasisLabel((0, 1))
    psi = label_vector(basis, {label: 0.6, other: 0.8})
    assert expectation(psi, build_operator(OperatorSpec("identity"), basis)) == pytest.approx(1.0)
    assert expectation(psi, build_operator(OperatorSpec("projector", label=label), basis)) == pytest.approx(0.36)


def test_number_expectation_against_dense_sum():
    basis = build_sector_basis(SectorConfig(1, bus_cutoff=6))
    alpha = 0.8 + 0.3j
    amplitudes = {BasisLabel((0,), n): alpha**n / np.sqrt(float(np.prod(np.arange(1, n + 1)))) for n in range(7)}
    psi = label_vector(basis, amplitudes)
    psi /= np.linalg.norm(psi)
    number = build_operator(OperatorSpec("number", mode="bus"), basis)
    expected = sum(label.n_bus * abs(psi[i]) ** 2 for i, label in enumerate(basis.labels))
    value = expectation(psi, number)
    assert value.real == pytest.approx(expected, abs=1e-12)
    assert abs(value.imag) < 1e-10
    assert expectation(np.outer(psi, psi.conj()), number) == pytest.approx(value, abs=1e-12)


def test_expectation_checks_dimensions():
    basis = build_sector_basis(SectorConfig(2))
    with pytest.raises(DimensionMismatchError):
        expectation(np.ones(5) / np.sqrt(5), build_operator(OperatorSpec("identity"), basis))


@pytest.fixture
def spurious_basis():
    return build_sector_basis(SectorConfig(1, bus_cutoff=1, spurious_cutoff=1, total_excitation_cap=2))


def test_partial_trace_of_a_product_state(spurious_basis):
    amplitudes = {BasisLabel((0,), 0, 0): 1 / np.sqrt(2), BasisLabel((1,), 1, 0): 1j / np.sqrt(2)}
    psi = label_vector(spurious_basis, amplitudes)
    rho, reduced = partial_trace_spurious(psi, spurious_basis)
    system = label_vector(reduced, {BasisLabel((0,), 0): 1 / np.sqrt(2), BasisLabel((1,), 1): 1j / np.sqrt(2)})
    np.testing.assert_allclose(rho, np.outer(system, system.conj()), atol=1e-15)


def test_partial_trace_of_a_correlated_state(spurious_basis):
    psi = label_vector(spurious_basis, {BasisLabel((0,), 0, 0): 1 / np.sqrt(2), BasisLabel((0,), 1, 1): 1 / np.sqrt(2)})
    rho, reduced = partial_trace_spurious(psi, spurious_basis)
    expected = np.zeros((reduced.dimension, reduced.dimension))
    for label in (BasisLabel((0,), 0), BasisLabel((0,), 1)):
        expected[reduced.index_of(label), reduced.index_of(label)] = 0.5
    np.testing.assert_allclose(rho, expected, atol=1e-15)


def test_partial_trace_against_explicit_sum(spurious_basis, rng):
    psi = rng.normal(size=spurious_basis.dimension) + 1j * rng.normal(size=spurious_basis.dimension)
    psi /= np.linalg.norm(psi)
    rho, reduced = partial_trace_spurious(psi, spurious_basis)

    expected = np.zeros((reduced.dimension, reduced.dimension), dtype=complex)
    for i, a in enumerate(spurious_basis.labels):
        for j, b in enumerate(spurious_basis.labels):
            if a.n_spurious == b.n_spurious:
                row = reduced.index_of(a._replace(n_spurious=0))
                col = reduced.index_of(b._replace(n_spurious=0))
                expected[row, col] += psi[i] * psi[j].conj()
    np.testing.assert_allclose(rho, expected, atol=1e-12)
    assert np.trace(rho).real == pytest.approx(1.0)

    from_density, _ = partial_trace_spurious(np.outer(psi, psi.conj()), spurious_basis)
    np.testing.assert_allclose(from_density, rho, atol=1e-12)


def test_partial_trace_needs_the_spurious_mode():
    basis = build_sector_basis(SectorConfig(2, bus_cutoff=1))
    with pytest.raises(InvalidSectorError):
        partial_trace_spurious(basis_vector(basis, basis.ground_label()), basis)


def test_traced_logical_block_matches_the_partial_trace(spurious_basis, rng):
    psi = rng.normal(size=spurious_basis.dimension) + 1j * rng.normal(size=spurious_basis.dimension)
    psi /= np.linalg.norm(psi)
    reduced = reduced_basis(spurious_basis)
    targets = np.column_stack([basis_vector(reduced, reduced.ground_label()), basis_vector(reduced, BasisLabel((1,)))])
    rho, _ = partial_trace_spurious(psi, spurious_basis)
    np.testing.assert_allclose(
        traced_logical_block(psi, spurious_basis, targets), targets.conj().T @ rho @ targets, atol=1e-12
    )


def test_two_excitation_dicke_state_by_enumeration():
    weights = np.array([0.3, -1.2, 0.7, 2.0, 0.5])
    basis = build_sector_basis(SectorConfig(5, max_ion_excitations=2))
    psi = dicke_state(basis, weights, 2)

    norm = np.sqrt(sum((weights[i] * weights[j]) ** 2 for i, j in combinations(range(5), 2)))
    for i, j in combinations(range(5), 2):
        pattern = tuple(SHELVED if k in (i, j) else 0 for k in range(5))
        assert psi[basis.index_of(BasisLabel(pattern))] == pytest.approx(weights[i] * weights[j] / norm)
    assert np.linalg.norm(psi) == pytest.approx(1.0)


def test_dicke_state_outside_the_basis():
    basis = build_sector_basis(SectorConfig(3))
    with pytest.raises(InvalidSectorError):
        dicke_state(basis, np.ones(3), 2)


def test_thermal_weights():
    np.testing.assert_array_equal(thermal_weights(0.0, 2), [1.0, 0.0, 0.0])
    weights = thermal_weights(0.2, 3)
    assert weights.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(weights[1:] / weights[:-1], 0.2 / 1.2)
    with pytest.raises(InvalidSectorError):
        thermal_weights(-0.1, 3)


###############################################################################
# Collective compression
###############################################################################
def test_compressed_dynamics_matches_the_full_basis():
    carrier = np.array([0.9, -0.4, 0.2])
    sideband = np.array([-0.3, 0.8, 1.0])
    basis = build_sector_basis(SectorConfig(3, max_ion_excitations=3, bus_cutoff=1, total_excitation_cap=3))

    coupling = OperatorSpec(
        "product", factors=(OperatorSpec.weighted("collective_x", sideband), OperatorSpec("quadrature", mode="bus"))
    )
    operators = [
        build_operator(OperatorSpec("number", mode="bus"), basis),
        0.9 * build_operator(OperatorSpec("level_population", levels=(SHELVED, SHELVED)), basis),
        0.05 * build_operator(coupling, basis),
        0.02 * build_operator(OperatorSpec.weighted("collective_x", carrier), basis),
    ]
    full = TimeDependentHamiltonian(sum(operators[1:], operators[0]))

    subspace = compress_collective(basis, [carrier, sideband], depth=20)
    assert subspace.saturated
    assert subspace.dimension <= basis.dimension
    compressed = full.transformed(subspace.compress)

    psi0 = basis_vector(basis, basis.ground_label(n_bus=1))
    assert subspace.captured_weight(psi0) == pytest.approx(1.0)
    reference = evolve_state(full, psi0, [0.0, 30.0]).final_state
    reduced = evolve_state(compressed, subspace.restrict(psi0), [0.0, 30.0]).final_state
    np.testing.assert_allclose(subspace.lift(reduced), reference, atol=1e-8)


def test_compression_needs_two_level_ions():
    basis = build_sector_basis(SectorConfig(2, levels_per_ion=3))
    with pytest.raises(InvalidSectorError):
        compress_collective(basis, [np.ones(2)])
