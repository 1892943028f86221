import logging
import pathlib
from typing import Optional, Sequence

import numpy as np

from ..errors import IonTransError
from .propagation import Trajectory

logger = logging.getLogger(__name__)


def write_trajectory_csv(trajectory: Trajectory, output_file: pathlib.Path, names: Optional[Sequence[str]] = None):
    """Dump the recorded observables (real parts) and accumulators as CSV columns t,<names>."""
    columns = dict(trajectory.observables)
    columns.update(trajectory.accumulators)
    names = list(columns) if names is None else list(names)
    missing = [name for name in names if name not in columns]
    if missing:
        raise IonTransError(f"trajectory holds no observable named {missing}")

    with open(output_file, "w", newline="\n") as f_out:
        f_out.write(",".join(["t"] + names) + "\n")
        for i, t in enumerate(trajectory.times):
            values = [t] + [np.real(columns[name][i]) for name in names]
            f_out.write(",".join(f"{v:.17g}" for v in values) + "\n")
    logger.info("wrote %d samples to %s", len(trajectory.times), output_file)
