"""
DESCRIPTION

    Time-dependent controls: the drive amplitudes Ω(t), Ω₁(t) and the detuning Δ(t).

    A PulseSchedule assigns one ControlShape to each named control over [0, T]. Shapes are registered in
    shape_entry_dict by kind.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping

import numpy as np

from ..errors import PulseDomainError

###############################################################################
# global constants
###############################################################################
AMPLITUDE_CONTROLS = ("omega", "omega1")
DETUNING_CONTROLS = ("delta",)
DOMAIN_TOLERANCE = 1e-12

logger = logging.getLogger(__name__)


###############################################################################
# Classes
###############################################################################
@dataclass(frozen=True)
class ControlShape:
    """One control profile.

    kind is one of "gaussian" (peak, center, width), "ramp" (peak, start, stop), "constant" (value) and
    "linear_chirp" (start_value, end_value); unused parameters stay at zero.
    """

    kind: str
    peak: float = 0.0
    center: float = 0.0
    width: float = 0.0
    start: float = 0.0
    stop: float = 0.0
    value: float = 0.0
    start_value: float = 0.0
    end_value: float = 0.0

    def __call__(self, t, duration: float):
        return shape_entry_dict[self.kind](self, t, duration)


@dataclass(frozen=True)
class PulseSchedule:
    duration: float
    controls: Mapping[str, ControlShape] = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.duration) or self.duration <= 0:
            raise PulseDomainError(f"the schedule duration must be positive and finite (got {self.duration})")
        for name, shape in self.controls.items():
            if shape.kind not in shape_entry_dict:
                raise PulseDomainError(f"unknown shape '{shape.kind}' for control '{name}'")
            if name in AMPLITUDE_CONTROLS and min(shape.peak, shape.value) < 0:
                raise PulseDomainError(f"amplitude control '{name}' must be non-negative")
            if shape.kind == "linear_chirp" and not np.isfinite([shape.start_value, shape.end_value]).all():
                raise PulseDomainError(f"chirp endpoints of '{name}' must be finite")
            if shape.kind == "gaussian" and shape.width <= 0:
                raise PulseDomainError(f"gaussian width of '{name}' must be positive")
            if shape.kind == "ramp" and shape.stop <= shape.start:
                raise PulseDomainError(f"ramp of '{name}' must stop after it starts")

    def control(self, name: str) -> Callable[[float], float]:
        """Unchecked evaluator of one control, for the integrators. Missing controls evaluate to zero."""
        shape = self.controls.get(name)
        if shape is None:
            return lambda t: 0.0
        return lambda t: float(shape(t, self.duration))

    def is_constant(self, name: str) -> bool:
        shape = self.controls.get(name)
        return shape is None or shape.kind == "constant"


###############################################################################
# Shapes
###############################################################################
def _gaussian(shape: ControlShape, t, duration: float):
    return shape.peak * np.exp(-0.5 * ((t - shape.center) / shape.width) ** 2)


def _ramp(shape: ControlShape, t, duration: float):
    """sin² rise from 0 at start to peak at stop, then flat."""
    x = np.clip((np.asarray(t, dtype=float) - shape.start) / (shape.stop - shape.start), 0.0, 1.0)
    return shape.peak * np.sin(0.5 * np.pi * x) ** 2


def _constant(shape: ControlShape, t, duration: float):
    return shape.value + 0.0 * np.asarray(t, dtype=float)


def _linear_chirp(shape: ControlShape, t, duration: float):
    return shape.start_value + (shape.end_value - shape.start_value) * np.asarray(t, dtype=float) / duration


shape_entry_dict: Dict[str, Callable] = {
    "gaussian": _gaussian,
    "ramp": _ramp,
    "constant": _constant,
    "linear_chirp": _linear_chirp,
}


def gaussian(peak: float, center: float, width: float) -> ControlShape:
    return ControlShape("gaussian", peak=peak, center=center, width=width)


def ramp(peak: float, start: float, stop: float) -> ControlShape:
    return ControlShape("ramp", peak=peak, start=start, stop=stop)


def constant(value: float) -> ControlShape:
    return ControlShape("constant", value=value)


def linear_chirp(start_value: float, end_value: float) -> ControlShape:
    return ControlShape("linear_chirp", start_value=start_value, end_value=end_value)


###############################################################################
# Functions
###############################################################################
def pulse_value(sched: PulseSchedule, t: float) -> Dict[str, float]:
    """Values of every control of the schedule at time t.

    Raises
    ------
    PulseDomainError
        If t lies outside [0, T]
    """
    slack = DOMAIN_TOLERANCE * sched.duration
    if not -slack <= t <= sched.duration + slack:
        raise PulseDomainError(f"t={t} lies outside the schedule [0, {sched.duration}]")
    return {name: float(shape(t, sched.duration)) for name, shape in sched.controls.items()}
