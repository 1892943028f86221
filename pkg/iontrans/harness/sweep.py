"""
DESCRIPTION

    Seeded sweeps over the chain size N and the phase realizations. Every (N, realization) point runs one protocol
    operation; a failing point is recorded in its row and the sweep goes on.
"""

import logging
import pathlib
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Tuple, Union

import numpy as np

from ..errors import IonTransError
from ..protocol import (
    GeometryInputs,
    ProtocolParams,
    run_joint_protocol,
    run_multi_excitation_retrieval,
    run_step1_retrieval,
    run_step2,
    run_step3,
)
from .config import RunConfig
from .io.plot_data import PlotDataSerialiser
from .io.tables import AggregateCSVSerialiser, RawCSVSerialiser
from .model import AggregateRow, SweepResult, SweepRow

logger = logging.getLogger(__name__)

# (fidelity, leakage, duration in seconds)
PointValues = Tuple[float, float, float]


###############################################################################
# Point functions
###############################################################################
def _step1_point(params: ProtocolParams, inputs: GeometryInputs) -> PointValues:
    report = run_step1_retrieval(params, inputs)
    return report.fidelity, report.spontaneous_loss, report.duration / params.kappa


def _step2_point(params: ProtocolParams, inputs: GeometryInputs) -> PointValues:
    report = run_step2(params, inputs)
    return report.fidelity, report.leakage, report.duration / params.trap_angular_frequency


def _step3_point(params: ProtocolParams, inputs: GeometryInputs) -> PointValues:
    report = run_step3(params, inputs)
    return report.fidelity, report.leakage, report.duration / params.trap_angular_frequency


def _joint_point(params: ProtocolParams, inputs: GeometryInputs) -> PointValues:
    report = run_joint_protocol(params, inputs)
    return report.fidelity, report.leakage, report.duration_phys


def _two_photon_point(params: ProtocolParams, inputs: GeometryInputs) -> PointValues:
    report = run_multi_excitation_retrieval(params, inputs, 2)
    return report.fidelity, report.spontaneous_loss, report.duration / params.kappa


point_entry_dict: Dict[str, Callable[[ProtocolParams, GeometryInputs], PointValues]] = dict()


def register_point(mode: str, point: Callable[[ProtocolParams, GeometryInputs], PointValues]) -> None:
    assert mode not in point_entry_dict, f"sweep mode {mode} registered twice"
    point_entry_dict[mode] = point


register_point("step1-sweep", _step1_point)
register_point("step2-sweep", _step2_point)
register_point("step3", _step3_point)
register_point("joint", _joint_point)
register_point("two-photon", _two_photon_point)


###############################################################################
# Sweep
###############################################################################
def evaluate_point(task: Tuple[RunConfig, int, int]) -> SweepRow:
    """Run the point (N, realization) of the configured mode; errors are caught into the row."""
    cfg, n_ions, realization = task
    row = SweepRow(n_ions, realization, cfg.seed)
    try:
        row.fidelity, row.leakage, row.duration_phys = point_entry_dict[cfg.mode](
            cfg.params, cfg.geometry_inputs(n_ions, realization)
        )
    except IonTransError as exc:
        row.error = f"{exc.__class__.__name__}: {exc}"
        logger.error("N=%d, realization %d failed: %s", n_ions, realization, row.error)
    return row


def aggregate_rows(rows: List[SweepRow]) -> List[AggregateRow]:
    """Mean and standard error of the fidelity per N over the successful realizations."""
    aggregate = []
    for n_ions in sorted({row.N for row in rows}):
        values = np.array([row.fidelity for row in rows if row.N == n_ions and not row.failed])
        if values.size == 0:
            aggregate.append(AggregateRow(n_ions, np.nan, np.nan, 0))
            continue
        stderr = float(np.std(values, ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
        aggregate.append(AggregateRow(n_ions, float(np.mean(values)), stderr, int(values.size)))
    return aggregate


def run_sweep(cfg: RunConfig) -> SweepResult:
    """Run the configured mode on every (N, realization) of the configuration.

    Points run in a pool of cfg.workers processes; rows come back in (N, realization) order whatever the
    scheduling, so the result only depends on the configuration.
    """
    if cfg.mode not in point_entry_dict:
        raise IonTransError(f"mode '{cfg.mode}' is not a sweep")
    tasks = [(cfg, n_ions, realization) for n_ions in cfg.n_ions for realization in range(cfg.realizations)]
    logger.info("%s sweep: %d points on %d worker(s)", cfg.mode, len(tasks), cfg.workers)

    if cfg.workers <= 1:
        rows = [evaluate_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            rows = list(executor.map(evaluate_point, tasks))

    result = SweepResult(cfg.mode, rows, aggregate_rows(rows))
    for entry in result.aggregate:
        logger.info("N=%d: mean %.6f ± %.2e over %d realization(s)", entry.N, entry.mean, entry.stderr, entry.R)
    return result


###############################################################################
# Outputs
###############################################################################
def write_outputs(result: SweepResult, out_dir: Union[str, pathlib.Path]) -> Dict[str, pathlib.Path]:
    """Write raw.csv, aggregate.csv and plot.dat into out_dir (created when missing).

    Raises
    ------
    IonTransError
        Naming the path that could not be written
    """
    out_dir = pathlib.Path(out_dir)
    paths = {
        "raw": out_dir / "raw.csv",
        "aggregate": out_dir / "aggregate.csv",
        "plot": out_dir / "plot.dat",
    }
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        RawCSVSerialiser().save(paths["raw"], result.rows)
        AggregateCSVSerialiser().save(paths["aggregate"], result.aggregate)
        PlotDataSerialiser().save(paths["plot"], result.aggregate)
    except OSError as exc:
        raise IonTransError(f"cannot write {exc.filename or out_dir}: {exc.strerror}") from exc
    logger.info("wrote %d rows to %s", len(result.rows), out_dir)
    return paths
