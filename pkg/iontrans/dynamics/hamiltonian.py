import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatchError
from ..statespace import canonicalize, hermiticity_defect

logger = logging.getLogger(__name__)


@dataclass
class TimeDependentHamiltonian:
    """H(t) = H_static + Σ_k f_k(t) H_k with real coefficients f_k.

    Instances are callable, so they can be passed wherever a hamiltonian_at(t) function is expected.
    """

    static: sp.csr_matrix
    terms: List[Tuple[Callable[[float], float], sp.csr_matrix]] = field(default_factory=list)

    def __post_init__(self):
        self.static = canonicalize(self.static)
        self.terms = [(coefficient, canonicalize(op)) for coefficient, op in self.terms]
        for _, op in self.terms:
            if op.shape != self.static.shape:
                raise DimensionMismatchError(f"term of shape {op.shape} in a Hamiltonian of shape {self.static.shape}")

    @property
    def dimension(self) -> int:
        return self.static.shape[0]

    @property
    def is_static(self) -> bool:
        return not self.terms

    def coefficients(self, t: float) -> np.ndarray:
        return np.array([coefficient(t) for coefficient, _ in self.terms])

    def __call__(self, t: float) -> sp.csr_matrix:
        op = self.static.copy()
        for coefficient, term in self.terms:
            value = coefficient(t)
            if value != 0.0:
                op = op + value * term
        return op

    def apply(self, t: float, block: np.ndarray) -> np.ndarray:
        """H(t) @ block without assembling H(t)."""
        out = self.static @ block
        for coefficient, term in self.terms:
            value = coefficient(t)
            if value != 0.0:
                out = out + value * (term @ block)
        return out

    def frozen(self, t: float) -> "TimeDependentHamiltonian":
        """The static Hamiltonian H(t)."""
        return TimeDependentHamiltonian(self(t))

    def transformed(self, transform: Callable[[sp.csr_matrix], sp.csr_matrix]) -> "TimeDependentHamiltonian":
        """Apply transform (e.g. CollectiveSubspace.compress) to every operator."""
        return TimeDependentHamiltonian(
            transform(self.static), [(coefficient, transform(op)) for coefficient, op in self.terms]
        )

    def hermiticity_defect(self) -> float:
        """Largest ‖A − A†‖_max over the static part and every term (hence over every t)."""
        return max([hermiticity_defect(self.static)] + [hermiticity_defect(op) for _, op in self.terms])
