import logging
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import List, Tuple

from ..errors import BasisBudgetError
from .model import GROUND, BasisLabel, SectorBasis, SectorConfig

logger = logging.getLogger(__name__)


def mode_occupations(cfg: SectorConfig, budget: int) -> List[Tuple[int, int, int]]:
    """All (n_bus, n_spurious, n_photon) within the cutoffs whose sum does not exceed budget."""
    return [
        occupations
        for occupations in product(
            range(cfg.bus_cutoff + 1), range(cfg.spurious_cutoff + 1), range(cfg.photon_cutoff + 1)
        )
        if sum(occupations) <= budget
    ]


def sector_dimension(cfg: SectorConfig) -> int:
    """Number of states within all caps, counted combinatorially."""
    total = 0
    for m in range(min(cfg.max_ion_excitations, cfg.n_ions, cfg.cap) + 1):
        ion_states = comb(cfg.n_ions, m) * (cfg.levels_per_ion - 1) ** m
        total += ion_states * len(mode_occupations(cfg, cfg.cap - m))
    return total


def ion_patterns(n_ions: int, levels_per_ion: int, n_excited: int):
    """Patterns with exactly n_excited ions outside |0⟩."""
    for sites in combinations(range(n_ions), n_excited):
        for levels in product(range(1, levels_per_ion), repeat=n_excited):
            pattern = [GROUND] * n_ions
            for site, level in zip(sites, levels):
                pattern[site] = level
            yield tuple(pattern)


def build_sector_basis(cfg: SectorConfig) -> SectorBasis:
    """Enumerate the excitation-truncated basis in lexicographic label order.

    Raises
    ------
    BasisBudgetError
        If the dimension exceeds cfg.max_dimension (checked before enumerating)
    """
    dimension = sector_dimension(cfg)
    if dimension > cfg.max_dimension:
        raise BasisBudgetError(dimension, cfg.max_dimension)

    labels = []
    for m in range(min(cfg.max_ion_excitations, cfg.n_ions, cfg.cap) + 1):
        occupations = mode_occupations(cfg, cfg.cap - m)
        for pattern in ion_patterns(cfg.n_ions, cfg.levels_per_ion, m):
            labels.extend(BasisLabel(pattern, *occ) for occ in occupations)
    labels.sort()

    assert len(labels) == dimension
    logger.debug("built sector basis of dimension %d for %s", dimension, cfg)
    return SectorBasis(cfg, labels, {label: i for i, label in enumerate(labels)})


@lru_cache(maxsize=16)
def cached_sector_basis(cfg: SectorConfig) -> SectorBasis:
    """build_sector_basis memoised on the (frozen) configuration. The result must not be mutated."""
    return build_sector_basis(cfg)
