from .model import GROUND, SHELVED, EXCITED, MODES, BasisLabel, SectorConfig, SectorBasis, OperatorSpec
from .basis import build_sector_basis, cached_sector_basis, sector_dimension, ion_patterns
from .operators import (
    build_operator,
    canonicalize,
    commutator_norm,
    hermitian_part,
    hermiticity_defect,
    operator_entry_dict,
)
from .states import (
    basis_vector,
    dicke_state,
    thermal_weights,
    expectation,
    partial_trace_spurious,
    reduced_basis,
    spurious_slices,
    traced_logical_block,
)
from .collective import CollectiveSubspace, compress_collective
from .io import dump_operator, load_operator

__all__ = [
    "GROUND",
    "SHELVED",
    "EXCITED",
    "MODES",
    "BasisLabel",
    "SectorConfig",
    "SectorBasis",
    "OperatorSpec",
    "build_sector_basis",
    "cached_sector_basis",
    "sector_dimension",
    "ion_patterns",
    "build_operator",
    "canonicalize",
    "commutator_norm",
    "hermitian_part",
    "hermiticity_defect",
    "operator_entry_dict",
    "basis_vector",
    "dicke_state",
    "thermal_weights",
    "expectation",
    "partial_trace_spurious",
    "reduced_basis",
    "spurious_slices",
    "traced_logical_block",
    "CollectiveSubspace",
    "compress_collective",
    "dump_operator",
    "load_operator",
]
