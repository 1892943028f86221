"""
DESCRIPTION

    Sparse operators on a sector basis.

    Each operator kind is a builder registered in operator_entry_dict. A builder turns an OperatorSpec into an
    "action": a function mapping one basis label to the list of (label, amplitude) it is sent to. Actions are
    evaluated on every basis label and images that fall outside the basis are dropped, so matrix elements leaving
    the sector are truncated. Products compose actions before truncating, i.e. they represent P·A·B·P.
"""

import logging
from typing import Callable, Dict, List, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatchError, OperatorSpecError
from .model import GROUND, MODES, SHELVED, BasisLabel, OperatorSpec, SectorBasis

###############################################################################
# global constants
###############################################################################
ZERO_TOLERANCE = 1e-15

Action = Callable[[BasisLabel], List[Tuple[BasisLabel, complex]]]

logger = logging.getLogger(__name__)


###############################################################################
# Builders
###############################################################################
def _check_site(spec: OperatorSpec, basis: SectorBasis) -> None:
    if spec.site is None or not 0 <= spec.site < basis.n_ions:
        raise OperatorSpecError(f"operator '{spec.kind}' needs a site in [0, {basis.n_ions}) (got {spec.site})")


def _check_mode(spec: OperatorSpec, basis: SectorBasis) -> None:
    if spec.mode not in MODES:
        raise OperatorSpecError(f"operator '{spec.kind}' needs a mode among {MODES} (got {spec.mode})")
    if not basis.has_mode(spec.mode):
        raise OperatorSpecError(f"the basis has no {spec.mode} mode")


def _site_weights(spec: OperatorSpec, basis: SectorBasis) -> np.ndarray:
    """Per-site weights: explicit weights, a single site, or uniform."""
    if spec.weights is not None:
        weights = np.asarray(spec.weights, dtype=float)
        if weights.shape != (basis.n_ions,):
            raise OperatorSpecError(f"weight vector has length {len(weights)}, the basis has {basis.n_ions} ions")
        return weights
    if spec.site is not None:
        _check_site(spec, basis)
        weights = np.zeros(basis.n_ions)
        weights[spec.site] = 1.0
        return weights
    return np.ones(basis.n_ions)


def _transition_action(weights: np.ndarray, target: int, source: int) -> Action:
    sites = [i for i, w in enumerate(weights) if w != 0.0]

    def action(label: BasisLabel):
        images = []
        for i in sites:
            if label.pattern[i] == source:
                pattern = label.pattern[:i] + (target,) + label.pattern[i + 1 :]
                images.append((label._replace(pattern=pattern), weights[i]))
        return images

    return action


def _build_transition(spec: OperatorSpec, basis: SectorBasis) -> Action:
    if spec.levels is None or len(spec.levels) != 2:
        raise OperatorSpecError("a transition needs levels=(target, source)")
    target, source = spec.levels
    if max(target, source) >= basis.config.levels_per_ion:
        raise OperatorSpecError(f"levels {spec.levels} exceed the {basis.config.levels_per_ion}-level ions")
    return _transition_action(_site_weights(spec, basis), target, source)


def _build_sigma_plus(spec: OperatorSpec, basis: SectorBasis) -> Action:
    _check_site(spec, basis)
    return _transition_action(_site_weights(spec, basis), SHELVED, GROUND)


def _build_sigma_minus(spec: OperatorSpec, basis: SectorBasis) -> Action:
    _check_site(spec, basis)
    return _transition_action(_site_weights(spec, basis), GROUND, SHELVED)


def _build_collective_raise(spec: OperatorSpec, basis: SectorBasis) -> Action:
    return _transition_action(_site_weights(spec, basis), SHELVED, GROUND)


def _build_collective_lower(spec: OperatorSpec, basis: SectorBasis) -> Action:
    return _transition_action(_site_weights(spec, basis), GROUND, SHELVED)


def _build_collective_x(spec: OperatorSpec, basis: SectorBasis) -> Action:
    """Σ_i w_i (σ⁺_i + σ⁻_i) on the |0⟩ ↔ |1⟩ transition."""
    raising = _build_collective_raise(spec, basis)
    lowering = _build_collective_lower(spec, basis)
    return lambda label: raising(label) + lowering(label)


def _build_level_population(spec: OperatorSpec, basis: SectorBasis) -> Action:
    if spec.levels is None:
        raise OperatorSpecError("a level population needs levels=(level, level)")
    level = spec.levels[0]
    weights = _site_weights(spec, basis)

    def action(label: BasisLabel):
        value = sum(weights[i] for i, lvl in enumerate(label.pattern) if lvl == level)
        return [(label, value)] if value != 0.0 else []

    return action


def _build_lower(spec: OperatorSpec, basis: SectorBasis) -> Action:
    _check_mode(spec, basis)
    mode = spec.mode

    def action(label: BasisLabel):
        n = label.occupation(mode)
        return [(label.with_occupation(mode, n - 1), np.sqrt(n))] if n > 0 else []

    return action


def _build_raise(spec: OperatorSpec, basis: SectorBasis) -> Action:
    _check_mode(spec, basis)
    mode = spec.mode

    def action(label: BasisLabel):
        n = label.occupation(mode)
        return [(label.with_occupation(mode, n + 1), np.sqrt(n + 1))]

    return action


def _build_quadrature(spec: OperatorSpec, basis: SectorBasis) -> Action:
    """b + b† on a mode."""
    lowering = _build_lower(spec, basis)
    raising = _build_raise(spec, basis)
    return lambda label: lowering(label) + raising(label)


def _build_number(spec: OperatorSpec, basis: SectorBasis) -> Action:
    _check_mode(spec, basis)
    mode = spec.mode
    return lambda label: [(label, float(label.occupation(mode)))] if label.occupation(mode) else []


def _build_excitation_number(spec: OperatorSpec, basis: SectorBasis) -> Action:
    return lambda label: [(label, float(label.total_excitations))] if label.total_excitations else []


def _build_identity(spec: OperatorSpec, basis: SectorBasis) -> Action:
    return lambda label: [(label, 1.0)]


def _build_projector(spec: OperatorSpec, basis: SectorBasis) -> Action:
    if spec.label is None or spec.label not in basis.index:
        raise OperatorSpecError(f"projector label {spec.label} is not in the basis")
    target = spec.label
    return lambda label: [(label, 1.0)] if label == target else []


def _build_product(spec: OperatorSpec, basis: SectorBasis) -> Action:
    if not spec.factors:
        raise OperatorSpecError("a product needs at least one factor")
    actions = [_action_for(factor, basis) for factor in spec.factors]

    def action(label: BasisLabel):
        images = [(label, 1.0)]
        for factor in reversed(actions):
            images = [(new, amp * amp_new) for lbl, amp in images for new, amp_new in factor(lbl)]
        return images

    return action


operator_entry_dict: Dict[str, Callable[[OperatorSpec, SectorBasis], Action]] = {
    "identity": _build_identity,
    "transition": _build_transition,
    "sigma_plus": _build_sigma_plus,
    "sigma_minus": _build_sigma_minus,
    "collective_raise": _build_collective_raise,
    "collective_lower": _build_collective_lower,
    "collective_x": _build_collective_x,
    "level_population": _build_level_population,
    "lower": _build_lower,
    "raise": _build_raise,
    "quadrature": _build_quadrature,
    "number": _build_number,
    "excitation_number": _build_excitation_number,
    "projector": _build_projector,
    "product": _build_product,
}


def _action_for(spec: OperatorSpec, basis: SectorBasis) -> Action:
    try:
        builder = operator_entry_dict[spec.kind]
    except KeyError:
        raise OperatorSpecError(f"unknown operator kind '{spec.kind}'") from None
    return builder(spec, basis)


###############################################################################
# Functions
###############################################################################
def canonicalize(op: sp.spmatrix) -> sp.csr_matrix:
    """CSR with sorted indices, summed duplicates and no entries below ZERO_TOLERANCE."""
    op = sp.csr_matrix(op, dtype=complex)
    op.sum_duplicates()
    op.data[np.abs(op.data) < ZERO_TOLERANCE] = 0.0
    op.eliminate_zeros()
    op.sort_indices()
    return op


def build_operator(spec: OperatorSpec, basis: SectorBasis) -> sp.csr_matrix:
    """Matrix of the operator described by spec, restricted to the basis.

    Raises
    ------
    OperatorSpecError
        For an unknown kind, a bad site/mode/level, or a weight vector whose length differs from N
    """
    action = _action_for(spec, basis)
    rows, cols, values = [], [], []
    for col, label in enumerate(basis.labels):
        for image, amplitude in action(label):
            row = basis.index.get(image)
            if row is not None and abs(amplitude) > ZERO_TOLERANCE:
                rows.append(row)
                cols.append(col)
                values.append(amplitude)
    dim = basis.dimension
    return canonicalize(sp.coo_matrix((values, (rows, cols)), shape=(dim, dim), dtype=complex))


def hermitian_part(op: sp.spmatrix) -> sp.csr_matrix:
    """(A + A†)/2, used to symmetrise products whose truncation breaks Hermiticity."""
    return canonicalize(0.5 * (op + op.getH()))


def hermiticity_defect(op) -> float:
    diff = op - op.conj().T
    if sp.issparse(diff):
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def commutator_norm(a, b) -> float:
    """‖[A, B]‖_max."""
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot commute operators of shapes {a.shape} and {b.shape}")
    comm = a @ b - b @ a
    if sp.issparse(comm):
        return float(np.max(np.abs(comm.data))) if comm.nnz else 0.0
    return float(np.max(np.abs(comm)))
