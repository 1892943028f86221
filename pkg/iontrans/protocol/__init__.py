from .params import ProtocolParams, GeometryInputs, PreparedChain, prepare_chain, spurious_frequency
from .model import Step1Report, Step2Report, Step3Report, JointReport, GateReport, ScanResult
from .step1 import (
    step1_sector_config,
    step1_schedule,
    assemble_step1_system,
    dark_state,
    vacuum_rabi_splitting,
    run_step1_retrieval,
    run_multi_excitation_retrieval,
)
from .step2 import (
    step2_sector_config,
    step2_schedule,
    drive_operator,
    step2_hamiltonian,
    assemble_step2_hamiltonian,
    thermal_inputs,
    logical_channel,
    run_step2,
)
from .step3 import (
    step3_sector_config,
    select_addressed_ion,
    step3_rabi_rate,
    step3_duration,
    step3_hamiltonian,
    transfer_fidelity,
    calibrate_stark_shift,
    run_step3,
)
from .calibration import doubling_scan, scan_chirp_duration, scan_ramp_duration
from .joint import schedule_durations, run_joint_protocol
from .gate import pair_retrieval_channel, pair_transfer_channels, photonic_gate_channel, run_photonic_phase_gate

__all__ = [
    "ProtocolParams",
    "GeometryInputs",
    "PreparedChain",
    "prepare_chain",
    "spurious_frequency",
    "Step1Report",
    "Step2Report",
    "Step3Report",
    "JointReport",
    "GateReport",
    "ScanResult",
    "step1_sector_config",
    "step1_schedule",
    "assemble_step1_system",
    "dark_state",
    "vacuum_rabi_splitting",
    "run_step1_retrieval",
    "run_multi_excitation_retrieval",
    "step2_sector_config",
    "step2_schedule",
    "drive_operator",
    "step2_hamiltonian",
    "assemble_step2_hamiltonian",
    "thermal_inputs",
    "logical_channel",
    "run_step2",
    "step3_sector_config",
    "select_addressed_ion",
    "step3_rabi_rate",
    "step3_duration",
    "step3_hamiltonian",
    "transfer_fidelity",
    "calibrate_stark_shift",
    "run_step3",
    "doubling_scan",
    "scan_chirp_duration",
    "scan_ramp_duration",
    "schedule_durations",
    "run_joint_protocol",
    "pair_retrieval_channel",
    "pair_transfer_channels",
    "photonic_gate_channel",
    "run_photonic_phase_gate",
]
