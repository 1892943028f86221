from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass
class SweepRow:
    """One (N, realization) point; failed points carry the error message and NaN values."""

    N: int
    realization: int
    seed: int
    fidelity: float = np.nan
    leakage: float = np.nan
    duration_phys: float = np.nan
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class AggregateRow:
    N: int
    mean: float
    stderr: float
    R: int


@dataclass
class SweepResult:
    mode: str
    rows: List[SweepRow] = field(default_factory=list)
    aggregate: List[AggregateRow] = field(default_factory=list)

    @property
    def failures(self) -> List[SweepRow]:
        return [row for row in self.rows if row.failed]


@dataclass
class OracleResult:
    """A closed-form check: |value − expected| ≤ tolerance (times |expected| when relative)."""

    name: str
    value: float
    expected: float
    tolerance: float
    relative: bool = False

    @property
    def error(self) -> float:
        error = abs(self.value - self.expected)
        return error / abs(self.expected) if self.relative else error

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)
