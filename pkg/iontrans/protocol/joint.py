"""
DESCRIPTION

    The complete transfer ion → bus phonon → collective spin wave → cavity photon (steps III, II, I in this order)
    on one chain realization.

    The step channels are reconstructed independently and composed sequentially on the logical qubit. Step I enters
    as the amplitude-damping channel losing the excitation with probability 1 − F2.
"""

import logging
from typing import Callable, Dict, Optional, TypeVar

from ..dynamics import amplitude_damping_channel, average_channel_fidelity, compose_channels, phase_corrected
from ..errors import IonTransError, StepError
from .model import JointReport, Step1Report, Step2Report, Step3Report
from .params import GeometryInputs, ProtocolParams, prepare_chain
from .step1 import run_step1_retrieval
from .step2 import run_step2
from .step3 import run_step3

###############################################################################
# global constants
###############################################################################
COMPOSITION_TOLERANCE = 1e-6

logger = logging.getLogger(__name__)

T = TypeVar("T")


###############################################################################
# Functions
###############################################################################
def schedule_durations(
    params: ProtocolParams, step1: Step1Report, step2: Step2Report, step3: Step3Report
) -> Dict[str, float]:
    """Durations of the simulated schedule in seconds, per step and in total.

    Steps II and III run in units of 1/ω, step I in units of 1/κ.
    """
    omega, kappa = params.trap_angular_frequency, params.kappa
    durations = {
        "III": step3.duration / omega,
        "II": step2.duration / omega,
        "I": step1.duration / kappa,
    }
    durations["total"] = sum(durations.values())
    return durations


def tagged_step(step: str, run: Callable[..., T], *args, **kwargs) -> T:
    try:
        return run(*args, **kwargs)
    except StepError:
        raise
    except IonTransError as exc:
        raise StepError(step, exc) from exc


def run_joint_protocol(
    params: ProtocolParams, inputs: GeometryInputs, addressed_ion: Optional[int] = None
) -> JointReport:
    """Run steps III, II and I on one chain realization and compose their channels.

    Raises
    ------
    StepError
        Tagged with the failing step ("geometry", "III", "II" or "I")
    """
    chain = tagged_step("geometry", prepare_chain, inputs, params)
    step3 = tagged_step("III", run_step3, params, inputs, addressed_ion, chain)
    step2 = tagged_step("II", run_step2, params, inputs, chain)
    step1 = tagged_step("I", run_step1_retrieval, params, inputs, chain)

    retrieval = amplitude_damping_channel(1.0 - step1.fidelity)
    composed, _ = phase_corrected(compose_channels(step3.channel, step2.channel, retrieval))
    fidelity = average_channel_fidelity(composed)

    step_fidelities = {"III": step3.fidelity, "II": step2.fidelity, "I": step1.fidelity}
    channel_fidelities = {
        "III": step3.channel_fidelity,
        "II": step2.fidelity,
        "I": average_channel_fidelity(retrieval),
    }
    composition_ok = fidelity <= min(channel_fidelities.values()) + COMPOSITION_TOLERANCE
    if not composition_ok:
        logger.warning(
            "composed fidelity %.8f exceeds the worst step channel fidelity %.8f",
            fidelity,
            min(channel_fidelities.values()),
        )

    durations = schedule_durations(params, step1, step2, step3)
    logger.info(
        "joint, N=%d: F=%.6f (F0·F1·F2=%.6f), %.3f ms",
        chain.n_ions,
        fidelity,
        step3.fidelity * step2.fidelity * step1.fidelity,
        1e3 * durations["total"],
    )
    return JointReport(
        n_ions=chain.n_ions,
        fidelity=fidelity,
        fidelity_product=step3.fidelity * step2.fidelity * step1.fidelity,
        step_fidelities=step_fidelities,
        channel_fidelities=channel_fidelities,
        composition_ok=composition_ok,
        leakage=composed.leakage,
        duration_phys=durations["total"],
        durations=durations,
        seed=inputs.seed,
        realization=inputs.realization,
        params=params,
        step1=step1,
        step2=step2,
        step3=step3,
    )
