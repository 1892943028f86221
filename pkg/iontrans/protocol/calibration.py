"""
DESCRIPTION

    Adequacy scans of the pulse durations left open by the protocol: the chirp duration T₂ of step II and the Ω₁
    ramp duration T₁ of step I. A duration is doubled until the step fidelity changes by less than the tolerance.
"""

import logging
from dataclasses import replace
from typing import Callable, Optional

from .model import ScanResult
from .params import GeometryInputs, PreparedChain, ProtocolParams, prepare_chain
from .step1 import run_step1_retrieval
from .step2 import run_step2

###############################################################################
# global constants
###############################################################################
SCAN_TOLERANCE = 1e-3
MAX_DOUBLINGS = 6

logger = logging.getLogger(__name__)


###############################################################################
# Functions
###############################################################################
def doubling_scan(
    parameter: str,
    fidelity_at: Callable[[float], float],
    start: float,
    tolerance: float = SCAN_TOLERANCE,
    max_doublings: int = MAX_DOUBLINGS,
) -> ScanResult:
    """Double a duration from start until two consecutive fidelities differ by less than tolerance.

    Parameters
    ----------
    parameter : str
        Name of the scanned ProtocolParams field
    fidelity_at : callable
        Fidelity as a function of the duration
    start : float
        First duration
    tolerance : float
        Convergence threshold on |ΔF|
    max_doublings : int
        Doublings tried before giving up; the last value is then reported as not converged

    Returns
    -------
    ScanResult
        converged_value is the shorter duration of the first converged pair
    """
    values = [start]
    fidelities = [fidelity_at(start)]
    logger.info("%s scan: %g → F=%.6f", parameter, start, fidelities[-1])
    for _ in range(max_doublings):
        values.append(2 * values[-1])
        fidelities.append(fidelity_at(values[-1]))
        logger.info("%s scan: %g → F=%.6f", parameter, values[-1], fidelities[-1])
        if abs(fidelities[-1] - fidelities[-2]) < tolerance:
            return ScanResult(parameter, tuple(values), tuple(fidelities), values[-2], True)

    logger.warning("%s scan did not converge after %d doublings", parameter, max_doublings)
    return ScanResult(parameter, tuple(values), tuple(fidelities), values[-1], False)


def scan_chirp_duration(
    params: ProtocolParams,
    inputs: GeometryInputs,
    start: float = 2e4,
    tolerance: float = SCAN_TOLERANCE,
    max_doublings: int = MAX_DOUBLINGS,
    chain: Optional[PreparedChain] = None,
) -> ScanResult:
    """Doubling scan of T₂ on F1."""
    chain = chain or prepare_chain(inputs, params)

    def fidelity_at(duration):
        return run_step2(replace(params, chirp_duration=duration), inputs, chain).fidelity

    return doubling_scan("chirp_duration", fidelity_at, start, tolerance, max_doublings)


def scan_ramp_duration(
    params: ProtocolParams,
    inputs: GeometryInputs,
    start: float = 0.25,
    tolerance: float = SCAN_TOLERANCE,
    max_doublings: int = MAX_DOUBLINGS,
    chain: Optional[PreparedChain] = None,
) -> ScanResult:
    """Doubling scan of T₁ on F2."""
    chain = chain or prepare_chain(inputs, params)

    def fidelity_at(duration):
        return run_step1_retrieval(replace(params, ramp_duration=duration), inputs, chain).fidelity

    return doubling_scan("ramp_duration", fidelity_at, start, tolerance, max_doublings)
