"""
DESCRIPTION

    Collective-subspace compression of a two-level sector basis.

    When every ion operator of a Hamiltonian is a weighted collective raising or lowering operator
    R_w = Σ_i w_i σ⁺_i (or its adjoint) or a function of the excitation number, the dynamics starting
    from |0̲⟩ stays in the closure of |0̲⟩ under those operators. The closure is grown one word length at a
    time, resolved by the number of excited ions, and orthonormalised in each sector. Tensored with every mode
    occupation the sector allows, it gives an isometry Q from a small space into the full basis. When the closure
    saturates before the depth limit, the compressed dynamics is exact.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from ..errors import DimensionMismatchError, InvalidSectorError
from .basis import mode_occupations, ion_patterns
from .model import SHELVED, BasisLabel, SectorBasis
from .operators import canonicalize

###############################################################################
# global constants
###############################################################################
DEFAULT_DEPTH = 6
DEFAULT_MAX_RANK = 48
DEFAULT_THRESHOLD = 1e-10

logger = logging.getLogger(__name__)


###############################################################################
# Classes
###############################################################################
@dataclass
class CollectiveSubspace:
    basis: SectorBasis
    isometry: sp.csr_matrix
    sector_ranks: Tuple[int, ...]
    saturated: bool

    @property
    def dimension(self) -> int:
        return self.isometry.shape[1]

    def compress(self, op) -> sp.csr_matrix:
        """Q† A Q."""
        if op.shape != (self.basis.dimension, self.basis.dimension):
            raise DimensionMismatchError(f"operator of shape {op.shape} on a basis of {self.basis.dimension} states")
        q = self.isometry
        return canonicalize(q.getH() @ (op @ q))

    def lift(self, state: np.ndarray) -> np.ndarray:
        """Embed compressed amplitudes (a vector or columns of vectors) into the full basis."""
        if state.shape[0] != self.dimension:
            raise DimensionMismatchError(f"state of dimension {state.shape[0]} on a subspace of {self.dimension}")
        return self.isometry @ state

    def restrict(self, vector: np.ndarray) -> np.ndarray:
        """Coordinates of the projection of a full-basis vector on the subspace."""
        if vector.shape[0] != self.basis.dimension:
            raise DimensionMismatchError(f"vector of dimension {vector.shape[0]} on a basis of {self.basis.dimension}")
        return self.isometry.getH() @ vector

    def captured_weight(self, vector: np.ndarray) -> float:
        """Squared norm of the part of vector inside the subspace, relative to its squared norm."""
        return float(np.linalg.norm(self.restrict(vector)) ** 2 / np.linalg.norm(vector) ** 2)


###############################################################################
# Functions
###############################################################################
def _sector_ladders(n_ions: int, max_excitations: int, weight_sets: Sequence[np.ndarray]):
    """Pattern lists per sector and, per weight set, sparse raising maps sector m -> m+1."""
    patterns = [list(ion_patterns(n_ions, 2, m)) for m in range(max_excitations + 1)]
    index = [{p: i for i, p in enumerate(sector)} for sector in patterns]

    raising: List[Dict[int, sp.csr_matrix]] = []
    for weights in weight_sets:
        maps = {}
        for m in range(max_excitations):
            rows, cols, values = [], [], []
            for col, pattern in enumerate(patterns[m]):
                for site, level in enumerate(pattern):
                    if level != 0 or weights[site] == 0.0:
                        continue
                    target = pattern[:site] + (SHELVED,) + pattern[site + 1 :]
                    rows.append(index[m + 1][target])
                    cols.append(col)
                    values.append(weights[site])
            maps[m] = sp.csr_matrix((values, (rows, cols)), shape=(len(patterns[m + 1]), len(patterns[m])))
        raising.append(maps)
    return patterns, raising


def _extend(current: np.ndarray, candidates: List[np.ndarray], max_rank: int, threshold: float) -> np.ndarray:
    """Append to the orthonormal columns of current the new directions spanned by candidates."""
    if not candidates or current.shape[1] >= max_rank:
        return current
    block = np.hstack(candidates)
    scale = max(1.0, float(np.max(np.abs(block))) if block.size else 1.0)
    for _ in range(2):
        block = block - current @ (current.T @ block)
    if block.size == 0:
        return current
    u, s, _ = la.svd(block, full_matrices=False)
    keep = s > threshold * scale
    new = u[:, keep][:, : max_rank - current.shape[1]]
    return np.hstack([current, new]) if new.shape[1] else current


def compress_collective(
    basis: SectorBasis,
    weight_sets: Sequence[Sequence[float]],
    depth: int = DEFAULT_DEPTH,
    max_rank: int = DEFAULT_MAX_RANK,
    threshold: float = DEFAULT_THRESHOLD,
) -> CollectiveSubspace:
    """Build the collective subspace of a two-level basis for the given weighted collective operators.

    Parameters
    ----------
    basis : SectorBasis
        A basis of two-level ions
    weight_sets : sequence of weight vectors
        One per collective operator Σ_i w_i σ^x_i appearing in the Hamiltonian
    depth : int
        Maximal number of closure rounds
    max_rank : int
        Maximal number of orthonormal ion vectors kept per excitation sector
    threshold : float
        Relative singular-value threshold below which a candidate direction is discarded

    Returns
    -------
    CollectiveSubspace
    """
    cfg = basis.config
    if cfg.levels_per_ion != 2:
        raise InvalidSectorError("collective compression supports two-level ions only")
    weight_sets = [np.asarray(w, dtype=float) for w in weight_sets]
    for weights in weight_sets:
        if weights.shape != (cfg.n_ions,):
            raise DimensionMismatchError(f"{len(weights)} weights for a chain of {cfg.n_ions} ions")

    max_m = min(cfg.max_ion_excitations, cfg.n_ions, cfg.cap)
    patterns, raising = _sector_ladders(cfg.n_ions, max_m, weight_sets)

    vectors = [np.ones((1, 1))] + [np.zeros((len(patterns[m]), 0)) for m in range(1, max_m + 1)]
    saturated = False
    for round_index in range(depth):
        ranks = [v.shape[1] for v in vectors]
        updated = list(vectors)
        for m in range(max_m + 1):
            candidates = []
            for maps in raising:
                if m > 0 and vectors[m - 1].shape[1]:
                    candidates.append(maps[m - 1] @ vectors[m - 1])
                if m < max_m and vectors[m + 1].shape[1]:
                    candidates.append(maps[m].T @ vectors[m + 1])
            updated[m] = _extend(vectors[m], candidates, max_rank, threshold)
        vectors = updated
        if [v.shape[1] for v in vectors] == ranks:
            saturated = all(v.shape[1] < max_rank or v.shape[1] == len(p) for v, p in zip(vectors, patterns))
            break
    logger.debug("collective closure after %d rounds: ranks %s", round_index + 1, [v.shape[1] for v in vectors])
    if not saturated:
        logger.info("collective closure not saturated at depth %d; compression is approximate", depth)

    # Tensor each sector with its mode occupations
    rows, cols, values = [], [], []
    column = 0
    for m in range(max_m + 1):
        sector_vectors = vectors[m]
        for occupations in mode_occupations(cfg, cfg.cap - m):
            full_rows = np.array([basis.index[BasisLabel(p, *occupations)] for p in patterns[m]])
            for j in range(sector_vectors.shape[1]):
                amplitudes = sector_vectors[:, j]
                nonzero = np.abs(amplitudes) > 0.0
                rows.extend(full_rows[nonzero])
                cols.extend([column] * int(nonzero.sum()))
                values.extend(amplitudes[nonzero])
                column += 1
    isometry = sp.csr_matrix((values, (rows, cols)), shape=(basis.dimension, column), dtype=complex)

    ranks = tuple(v.shape[1] for v in vectors)
    logger.info("compressed %d states to %d (sector ranks %s)", basis.dimension, column, ranks)
    return CollectiveSubspace(basis, isometry, ranks, saturated)
