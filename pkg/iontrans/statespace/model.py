from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from ..errors import InvalidSectorError

###############################################################################
# global constants
###############################################################################

# Internal levels of an ion
GROUND = 0  # |0⟩
SHELVED = 1  # |1⟩
EXCITED = 2  # |e⟩

MODES = ("bus", "spurious", "photon")


###############################################################################
# Classes
###############################################################################
class BasisLabel(NamedTuple):
    """One basis state: ion levels, bus phonons n_pn, spurious phonons ñ_pn and cavity photons n_ph."""

    pattern: Tuple[int, ...]
    n_bus: int = 0
    n_spurious: int = 0
    n_photon: int = 0

    @property
    def ion_excitations(self) -> int:
        return sum(1 for level in self.pattern if level != GROUND)

    @property
    def total_excitations(self) -> int:
        return self.ion_excitations + self.n_bus + self.n_spurious + self.n_photon

    def occupation(self, mode: str) -> int:
        return getattr(self, "n_" + mode)

    def with_occupation(self, mode: str, value: int) -> "BasisLabel":
        return self._replace(**{"n_" + mode: value})


@dataclass(frozen=True)
class SectorConfig:
    """Caps of the excitation-truncated space. A cutoff of 0 removes the mode."""

    n_ions: int
    levels_per_ion: int = 2
    max_ion_excitations: int = 1
    bus_cutoff: int = 0
    spurious_cutoff: int = 0
    photon_cutoff: int = 0
    total_excitation_cap: Optional[int] = None
    max_dimension: int = 200_000

    def __post_init__(self):
        if self.n_ions < 1:
            raise InvalidSectorError(f"n_ions must be positive (got {self.n_ions})")
        if self.levels_per_ion not in (2, 3):
            raise InvalidSectorError(f"levels_per_ion must be 2 or 3 (got {self.levels_per_ion})")
        if self.max_ion_excitations < 1:
            raise InvalidSectorError(f"max_ion_excitations must be at least 1 (got {self.max_ion_excitations})")
        for name in ("bus_cutoff", "spurious_cutoff", "photon_cutoff"):
            if getattr(self, name) < 0:
                raise InvalidSectorError(f"{name} must be non-negative (got {getattr(self, name)})")
        if self.total_excitation_cap is not None and self.total_excitation_cap < self.max_ion_excitations:
            raise InvalidSectorError(
                f"total_excitation_cap ({self.total_excitation_cap}) is below max_ion_excitations "
                f"({self.max_ion_excitations})"
            )

    @property
    def cap(self) -> int:
        if self.total_excitation_cap is not None:
            return self.total_excitation_cap
        return self.max_ion_excitations + self.bus_cutoff + self.spurious_cutoff + self.photon_cutoff

    def cutoff(self, mode: str) -> int:
        return getattr(self, mode + "_cutoff")


@dataclass
class SectorBasis:
    config: SectorConfig
    labels: List[BasisLabel]
    index: Dict[BasisLabel, int] = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.labels)

    @property
    def n_ions(self) -> int:
        return self.config.n_ions

    def index_of(self, label: BasisLabel) -> int:
        return self.index[label]

    def has_mode(self, mode: str) -> bool:
        return self.config.cutoff(mode) > 0

    def ground_label(self, n_bus: int = 0, n_spurious: int = 0, n_photon: int = 0) -> BasisLabel:
        return BasisLabel((GROUND,) * self.n_ions, n_bus, n_spurious, n_photon)


@dataclass(frozen=True)
class OperatorSpec:
    """Description of an operator for build_operator.

    kind selects the builder (see iontrans.statespace.operators.operator_entry_dict); site, weights, mode, levels
    and label parametrise it; factors holds the operand specs of a "product" (rightmost acts first).
    """

    kind: str
    site: Optional[int] = None
    weights: Optional[Tuple[float, ...]] = None
    mode: Optional[str] = None
    levels: Optional[Tuple[int, int]] = None
    label: Optional[BasisLabel] = None
    factors: Tuple["OperatorSpec", ...] = ()

    @staticmethod
    def weighted(kind: str, weights, **kwargs) -> "OperatorSpec":
        return OperatorSpec(kind, weights=tuple(float(w) for w in np.asarray(weights, dtype=float)), **kwargs)
