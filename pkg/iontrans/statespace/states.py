import logging
from dataclasses import replace
from itertools import combinations
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatchError, InvalidSectorError, NormalizationError
from .basis import cached_sector_basis
from .model import GROUND, SHELVED, BasisLabel, SectorBasis

logger = logging.getLogger(__name__)


###############################################################################
# Construction
###############################################################################
def basis_vector(basis: SectorBasis, label: BasisLabel) -> np.ndarray:
    if label not in basis.index:
        raise InvalidSectorError(f"label {label} is not in the basis")
    psi = np.zeros(basis.dimension, dtype=complex)
    psi[basis.index[label]] = 1.0
    return psi


def dicke_state(
    basis: SectorBasis,
    weights: Sequence[float],
    n_excitations: int = 1,
    level: int = SHELVED,
    n_bus: int = 0,
    n_spurious: int = 0,
    n_photon: int = 0,
) -> np.ndarray:
    """Normalised weighted Dicke-like state ∝ Σ_{i1<...<in} w_i1...w_in |...level_i1...level_in...⟩.

    Summing over ordered tuples only multiplies every amplitude by n!, which the normalisation absorbs.

    Raises
    ------
    NormalizationError
        If all the amplitudes vanish
    InvalidSectorError
        If a required label lies outside the basis
    """
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (basis.n_ions,):
        raise DimensionMismatchError(f"{len(weights)} weights for a chain of {basis.n_ions} ions")

    psi = np.zeros(basis.dimension, dtype=complex)
    for sites in combinations(range(basis.n_ions), n_excitations):
        amplitude = np.prod(weights[list(sites)])
        if amplitude == 0.0:
            continue
        pattern = [GROUND] * basis.n_ions
        for site in sites:
            pattern[site] = level
        label = BasisLabel(tuple(pattern), n_bus, n_spurious, n_photon)
        if label not in basis.index:
            raise InvalidSectorError(f"Dicke component {label} is not in the basis")
        psi[basis.index[label]] = amplitude

    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise NormalizationError(f"the {n_excitations}-excitation Dicke state of these weights vanishes")
    return psi / norm


def thermal_weights(nbar: float, cutoff: int) -> np.ndarray:
    """Bose-Einstein occupation probabilities p_0..p_cutoff, truncated and renormalised."""
    if nbar < 0:
        raise InvalidSectorError(f"mean occupation must be non-negative (got {nbar})")
    if nbar == 0:
        weights = np.zeros(cutoff + 1)
        weights[0] = 1.0
        return weights
    ratio = nbar / (1.0 + nbar)
    weights = ratio ** np.arange(cutoff + 1)
    return weights / weights.sum()


###############################################################################
# Measurements
###############################################################################
def expectation(state: np.ndarray, op) -> complex:
    """⟨ψ|A|ψ⟩ for a vector, Tr(ρA) for a matrix.

    Raises
    ------
    DimensionMismatchError
        If the state and the operator live on different spaces
    """
    state = np.asarray(state)
    if op.shape[0] != state.shape[0] or (state.ndim == 2 and state.shape != op.shape):
        raise DimensionMismatchError(f"state of shape {state.shape} against operator of shape {op.shape}")
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    if sp.issparse(op):
        return complex(op.multiply(state.T).sum())
    return complex(np.sum(op * state.T))


def reduced_basis(basis: SectorBasis) -> SectorBasis:
    """The basis left once the spurious mode is traced out (the basis itself when it has no spurious mode)."""
    if not basis.has_mode("spurious"):
        return basis
    cfg = basis.config
    return cached_sector_basis(replace(cfg, spurious_cutoff=0, total_excitation_cap=cfg.cap))


def _spurious_layout(basis: SectorBasis):
    """Reduced basis, and for every full label its (reduced index, n_spurious)."""
    reduced = reduced_basis(basis)
    rows = np.empty(basis.dimension, dtype=int)
    occupations = np.empty(basis.dimension, dtype=int)
    for i, label in enumerate(basis.labels):
        rows[i] = reduced.index[label._replace(n_spurious=0)]
        occupations[i] = label.n_spurious
    return reduced, rows, occupations


def spurious_slices(psi: np.ndarray, basis: SectorBasis):
    """Split a pure state along the spurious mode.

    Returns
    -------
    reduced : SectorBasis
        The basis without the spurious mode
    slices : np.ndarray
        Matrix of shape (reduced dimension, spurious cutoff + 1); column k holds ⟨·;k|ψ⟩
    """
    if psi.shape[0] != basis.dimension:
        raise DimensionMismatchError(f"state of dimension {psi.shape[0]} on a basis of {basis.dimension} states")
    reduced, rows, occupations = _spurious_layout(basis)
    slices = np.zeros((reduced.dimension, basis.config.spurious_cutoff + 1), dtype=complex)
    slices[rows, occupations] = psi
    return reduced, slices


def partial_trace_spurious(state: np.ndarray, basis: SectorBasis):
    """Trace out the spurious phonon mode of a pure state or a density matrix.

    Returns
    -------
    rho : np.ndarray
        Dense reduced density matrix
    reduced : SectorBasis
        Basis of rho
    """
    state = np.asarray(state)
    if not basis.has_mode("spurious"):
        raise InvalidSectorError("the basis carries no spurious mode")
    if state.shape[0] != basis.dimension:
        raise DimensionMismatchError(f"state of dimension {state.shape[0]} on a basis of {basis.dimension} states")

    if state.ndim == 1:
        reduced, slices = spurious_slices(state, basis)
        return slices @ slices.conj().T, reduced

    reduced, rows, occupations = _spurious_layout(basis)
    rho = np.zeros((reduced.dimension, reduced.dimension), dtype=complex)
    for k in np.unique(occupations):
        full = np.flatnonzero(occupations == k)
        rho[np.ix_(rows[full], rows[full])] += state[np.ix_(full, full)]
    return rho, reduced


def traced_logical_block(psi: np.ndarray, basis: SectorBasis, targets: np.ndarray) -> np.ndarray:
    """⟨t_a| Tr_spurious(|ψ⟩⟨ψ|) |t_b⟩ for the columns t_a of targets (vectors on the reduced basis).

    When the basis has no spurious mode, this is simply the projection of |ψ⟩⟨ψ| on the targets.
    """
    if not basis.has_mode("spurious"):
        amplitudes = targets.conj().T @ psi
        return np.outer(amplitudes, amplitudes.conj())
    _, slices = spurious_slices(psi, basis)
    amplitudes = targets.conj().T @ slices
    return amplitudes @ amplitudes.conj().T
