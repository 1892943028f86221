"""
DESCRIPTION

    Comma-separated result tables: raw sweep rows, per-N aggregates, oracle results and duration scans.

    Floats carry 17 significant digits with '.' as decimal separator; lines end with LF.
"""

import csv
import pathlib
from typing import List, Sequence

from ...errors import IonTransError
from ...protocol import ScanResult
from ..model import AggregateRow, OracleResult, SweepRow
from . import ResultSerialiser, format_number


###############################################################################
# Classes
###############################################################################
class CSVSerialiser(ResultSerialiser):
    """Table with a fixed header; subclasses convert between objects and rows of strings."""

    header: Sequence[str] = ()

    def to_row(self, entry) -> List:
        raise NotImplementedError("")

    def from_row(self, row: dict):
        raise NotImplementedError("")

    def save(self, output_file: pathlib.Path, content: Sequence) -> None:
        with open(output_file, "w", newline="") as f_out:
            writer = csv.writer(f_out, lineterminator="\n")
            writer.writerow(self.header)
            for entry in content:
                writer.writerow([format_number(v) if not isinstance(v, str) else v for v in self.to_row(entry)])
        self.logger.debug("wrote %d rows to %s", len(content), output_file)

    def load(self, input_file: pathlib.Path) -> List:
        with open(input_file, newline="") as f_in:
            reader = csv.DictReader(f_in)
            if tuple(reader.fieldnames or ()) != tuple(self.header):
                raise IonTransError(f"{input_file} has header {reader.fieldnames}, expected {list(self.header)}")
            return [self.from_row(row) for row in reader]


class RawCSVSerialiser(CSVSerialiser):
    """One line per (N, realization); failed points hold NaN values."""

    header = ("N", "realization", "seed", "fidelity", "leakage", "duration_phys")

    def to_row(self, entry: SweepRow) -> List:
        return [entry.N, entry.realization, entry.seed, entry.fidelity, entry.leakage, entry.duration_phys]

    def from_row(self, row: dict) -> SweepRow:
        return SweepRow(
            int(row["N"]),
            int(row["realization"]),
            int(row["seed"]),
            float(row["fidelity"]),
            float(row["leakage"]),
            float(row["duration_phys"]),
        )


class AggregateCSVSerialiser(CSVSerialiser):
    header = ("N", "mean", "stderr", "R")

    def to_row(self, entry: AggregateRow) -> List:
        return [entry.N, entry.mean, entry.stderr, entry.R]

    def from_row(self, row: dict) -> AggregateRow:
        return AggregateRow(int(row["N"]), float(row["mean"]), float(row["stderr"]), int(row["R"]))


class OracleCSVSerialiser(CSVSerialiser):
    header = ("name", "value", "expected", "tolerance", "relative", "passed")

    def to_row(self, entry: OracleResult) -> List:
        return [entry.name, entry.value, entry.expected, entry.tolerance, entry.relative, entry.passed]

    def from_row(self, row: dict) -> OracleResult:
        return OracleResult(
            row["name"], float(row["value"]), float(row["expected"]), float(row["tolerance"]), row["relative"] == "true"
        )


class ScanCSVSerialiser(ResultSerialiser):
    """The scanned durations and their fidelities, under the header <parameter>,fidelity."""

    def save(self, output_file: pathlib.Path, content: ScanResult) -> None:
        with open(output_file, "w", newline="") as f_out:
            writer = csv.writer(f_out, lineterminator="\n")
            writer.writerow([content.parameter, "fidelity"])
            for value, fidelity in zip(content.values, content.fidelities):
                writer.writerow([format_number(value), format_number(fidelity)])
