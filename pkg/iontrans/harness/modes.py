"""
DESCRIPTION

    Run modes of the command line. Each mode is a ModeRunner registered in mode_entry_dict under its name; running
    it writes its outputs into the configured directory and returns the descriptions of the failed points.
"""

import logging
import pathlib
from typing import Callable, Dict, List, Type

from ..errors import IonTransError
from ..protocol import ScanResult, run_photonic_phase_gate, scan_chirp_duration, scan_ramp_duration
from .config import MODES, RunConfig
from .io.json import JSONSerialiser
from .io.tables import OracleCSVSerialiser, ScanCSVSerialiser
from .oracles import run_oracle_suite
from .sweep import point_entry_dict, run_sweep, write_outputs

###############################################################################
# global constants
###############################################################################
CONFIG_ECHO = "config.json"


###############################################################################
# Classes
###############################################################################
class ModeRunner:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out_dir = pathlib.Path(cfg.out)
        self.logger = logging.getLogger(self.__class__.__name__)

    def run(self) -> List[str]:
        raise NotImplementedError("")

    def prepare_output(self) -> None:
        """Create the output directory and echo the resolved configuration into it."""
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            JSONSerialiser().save(self.out_dir / CONFIG_ECHO, self.cfg)
        except OSError as exc:
            raise IonTransError(f"cannot write {exc.filename or self.out_dir}: {exc.strerror}") from exc


class SweepRunner(ModeRunner):
    """Every (N, realization) point of a protocol operation, then raw.csv, aggregate.csv and plot.dat."""

    def run(self) -> List[str]:
        self.prepare_output()
        result = run_sweep(self.cfg)
        write_outputs(result, self.out_dir)
        return [f"N={row.N} realization={row.realization}: {row.error}" for row in result.failures]


class GateRunner(ModeRunner):
    """The phase gate on the first configured N (realization 0), reported in gate.json."""

    def run(self) -> List[str]:
        self.prepare_output()
        n_ions = self.cfg.n_ions[0]
        inputs = None if self.cfg.gate_ideal else self.cfg.geometry_inputs(n_ions)
        try:
            report = run_photonic_phase_gate(
                self.cfg.params, self.cfg.amplitudes, inputs, ideal=self.cfg.gate_ideal, two_photon=self.cfg.two_photon
            )
        except IonTransError as exc:
            return [f"N={n_ions}: {exc.__class__.__name__}: {exc}"]

        JSONSerialiser().save(self.out_dir / "gate.json", report)
        self.logger.info("gate fidelity %.6f (overlap %.6f)", report.fidelity, report.overlap)
        return []


class OracleRunner(ModeRunner):
    def run(self) -> List[str]:
        self.prepare_output()
        results = run_oracle_suite()
        OracleCSVSerialiser().save(self.out_dir / "oracles.csv", results)
        return [
            f"oracle {r.name}: {r.value:.12g} vs {r.expected:.12g} (tolerance {r.tolerance:.0e})"
            for r in results
            if not r.passed
        ]


class ScanRunner(ModeRunner):
    """Doubling scan of a duration on the first configured N (realization 0), written to scan.csv and scan.json."""

    parameter = ""
    default_start = 1.0
    scan: Callable[..., ScanResult]

    def run(self) -> List[str]:
        self.prepare_output()
        cfg = self.cfg
        n_ions = cfg.n_ions[0]
        start = cfg.scan_start if cfg.scan_start is not None else self.default_start
        try:
            result = self.scan(
                cfg.params, cfg.geometry_inputs(n_ions), start, cfg.scan_tolerance, cfg.scan_max_doublings
            )
        except IonTransError as exc:
            return [f"N={n_ions}: {exc.__class__.__name__}: {exc}"]

        ScanCSVSerialiser().save(self.out_dir / "scan.csv", result)
        JSONSerialiser().save(self.out_dir / "scan.json", result)
        state = "converged" if result.converged else "not converged"
        print(f"{self.parameter} = {result.converged_value:.17g} ({state})")
        return []


class ChirpScanRunner(ScanRunner):
    parameter = "chirp_duration"
    default_start = 2e4
    scan = staticmethod(scan_chirp_duration)


class RampScanRunner(ScanRunner):
    parameter = "ramp_duration"
    default_start = 0.25
    scan = staticmethod(scan_ramp_duration)


###############################################################################
# Registry
###############################################################################
mode_entry_dict: Dict[str, Type[ModeRunner]] = dict()


def register_mode(name: str, runner: Type[ModeRunner]) -> None:
    assert name not in mode_entry_dict, f"mode {name} registered twice"
    mode_entry_dict[name] = runner


for _mode in point_entry_dict:
    register_mode(_mode, SweepRunner)
register_mode("gate", GateRunner)
register_mode("oracle-suite", OracleRunner)
register_mode("chirp-scan", ChirpScanRunner)
register_mode("ramp-scan", RampScanRunner)

assert set(mode_entry_dict) == set(MODES), "every configured mode needs a runner"
