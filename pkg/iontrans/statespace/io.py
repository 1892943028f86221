import logging
import pathlib

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatchError
from .operators import canonicalize

logger = logging.getLogger(__name__)


def dump_operator(op, output_file: pathlib.Path) -> None:
    """Write a sparse operator as a coordinate list, one "row col re im" entry per line in canonical order.

    The first line holds the dimension. Numbers carry 17 significant digits.
    """
    if op.shape[0] != op.shape[1]:
        raise DimensionMismatchError(f"operator must be square (got shape {op.shape})")
    coo = canonicalize(op).tocoo()
    with open(output_file, "w", newline="\n") as f_out:
        f_out.write(f"{op.shape[0]}\n")
        for row, col, value in zip(coo.row, coo.col, coo.data):
            f_out.write(f"{row} {col} {value.real:.17g} {value.imag:.17g}\n")
    logger.debug("dumped %d entries to %s", coo.nnz, output_file)


def load_operator(input_file: pathlib.Path) -> sp.csr_matrix:
    with open(input_file) as f_in:
        dimension = int(f_in.readline())
        entries = np.loadtxt(f_in, ndmin=2)
    if entries.size == 0:
        return sp.csr_matrix((dimension, dimension), dtype=complex)
    values = entries[:, 2] + 1j * entries[:, 3]
    rows, cols = entries[:, 0].astype(int), entries[:, 1].astype(int)
    return sp.csr_matrix((values, (rows, cols)), shape=(dimension, dimension), dtype=complex)
