from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..dynamics import ChannelEstimate
from .params import ProtocolParams


@dataclass
class Step2Report:
    """Phonon to collective-spin-wave transfer (step II)."""

    n_ions: int
    fidelity: float
    fidelity_uncorrected: float
    leakage: float
    overlaps: Tuple[float, ...]
    phase_correction: float
    adiabatic: bool
    leakage_warning: bool
    duration: float
    dimension: int
    compressed: bool
    method: str
    norm_drift: float
    hermiticity_defect: float
    phases: Tuple[float, ...]
    seed: int
    realization: int
    convergence_delta: Optional[float] = None
    channel: Optional[ChannelEstimate] = field(default=None, repr=False, compare=False)


@dataclass
class Step1Report:
    """Retrieval of the collective excitation into the cavity (step I)."""

    n_ions: int
    n_excitations: int
    fidelity: float
    efficiency: float
    excited_integral: float
    spontaneous_loss: float
    residual: float
    duration: float
    ramp_duration: float
    collective_coupling: float
    enhancement: float
    trace_drift: float
    min_eigenvalue: float
    seed: int
    realization: int


@dataclass
class Step3Report:
    """Single-ion to bus-phonon transfer (step III)."""

    n_ions: int
    fidelity: float
    channel_fidelity: float
    offset: float
    calibrated: bool
    addressed_ion: int
    sideband_weight: float
    weak_coupling: bool
    rabi_rate: float
    duration: float
    leakage: float
    seed: int
    realization: int
    channel: Optional[ChannelEstimate] = field(default=None, repr=False, compare=False)


@dataclass
class JointReport:
    n_ions: int
    fidelity: float
    fidelity_product: float
    step_fidelities: Dict[str, float]
    channel_fidelities: Dict[str, float]
    composition_ok: bool
    leakage: float
    duration_phys: float
    durations: Dict[str, float]
    seed: int
    realization: int
    params: ProtocolParams
    step1: Step1Report
    step2: Step2Report
    step3: Step3Report


@dataclass
class GateReport:
    """Photonic two-photon phase gate α0|0⟩ + α1|1⟩ + α2|2⟩ → α0|0⟩ + α1|1⟩ − α2|2⟩."""

    inputs: np.ndarray
    outputs: np.ndarray
    target: np.ndarray
    output_state: np.ndarray
    survival: np.ndarray
    success_probability: float
    overlap: float
    fidelity: float
    gate_fidelity: float
    step_fidelities: Dict[str, float]
    ideal: bool
    channel: Optional[ChannelEstimate] = field(default=None, repr=False, compare=False)


@dataclass
class ScanResult:
    """Doubling scan of a duration until the fidelity changes by less than the tolerance."""

    parameter: str
    values: Tuple[float, ...]
    fidelities: Tuple[float, ...]
    converged_value: float
    converged: bool
