from .pulses import (
    ControlShape,
    PulseSchedule,
    pulse_value,
    gaussian,
    ramp,
    constant,
    linear_chirp,
    shape_entry_dict,
)
from .hamiltonian import TimeDependentHamiltonian
from .propagation import (
    Trajectory,
    evolve_state,
    evolve_density,
    exponential_action,
    liouvillian,
    commutator_superoperator,
    dissipator_superoperator,
)
from .channel import (
    ChannelEstimate,
    standard_inputs,
    reconstruct_channel,
    channel_from_kraus,
    unitary_channel,
    identity_channel,
    amplitude_damping_channel,
    dephasing_channel,
    diagonal_loss_channel,
    compose_channels,
    tensor_channels,
    average_channel_fidelity,
    phase_corrected,
    input_fidelities,
    monte_carlo_average_fidelity,
)
from .io import write_trajectory_csv

__all__ = [
    "ControlShape",
    "PulseSchedule",
    "pulse_value",
    "gaussian",
    "ramp",
    "constant",
    "linear_chirp",
    "shape_entry_dict",
    "TimeDependentHamiltonian",
    "Trajectory",
    "evolve_state",
    "evolve_density",
    "exponential_action",
    "liouvillian",
    "commutator_superoperator",
    "dissipator_superoperator",
    "ChannelEstimate",
    "standard_inputs",
    "reconstruct_channel",
    "channel_from_kraus",
    "unitary_channel",
    "identity_channel",
    "amplitude_damping_channel",
    "dephasing_channel",
    "diagonal_loss_channel",
    "compose_channels",
    "tensor_channels",
    "average_channel_fidelity",
    "phase_corrected",
    "input_fidelities",
    "monte_carlo_average_fidelity",
    "write_trajectory_csv",
]
