import pathlib
from typing import Sequence

import numpy as np

from ..model import AggregateRow
from . import ResultSerialiser, format_number


class PlotDataSerialiser(ResultSerialiser):
    """Whitespace-separated columns N, mean, stderr under a '#' comment header (gnuplot, numpy.loadtxt)."""

    def load(self, input_file: pathlib.Path) -> np.ndarray:
        return np.loadtxt(input_file, ndmin=2)

    def save(self, output_file: pathlib.Path, content: Sequence[AggregateRow]) -> None:
        with open(output_file, "w", newline="\n") as f_out:
            f_out.write("# N mean stderr\n")
            for entry in content:
                f_out.write(" ".join(format_number(v) for v in (entry.N, entry.mean, entry.stderr)) + "\n")
