"""
DESCRIPTION

    Run configuration: one flat JSON object mixing run entries (mode, N, realizations, ...) with ProtocolParams
    entries. Every key is optional; missing keys take the defaults, unknown keys are rejected.

    The schema is documented in docs/config_schema.md.
"""

import json
import logging
import pathlib
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..errors import ConfigError, GeometryError
from ..protocol import GeometryInputs, ProtocolParams

###############################################################################
# global constants
###############################################################################
MODES = (
    "step1-sweep",
    "step2-sweep",
    "step3",
    "joint",
    "two-photon",
    "gate",
    "oracle-suite",
    "chirp-scan",
    "ramp-scan",
)

# JSON key → RunConfig attribute, for the keys whose names differ
KEY_ALIASES = {"N": "n_ions"}

# RunConfig attribute → expected JSON kind
RUN_KINDS = {
    "mode": "str",
    "n_ions": "int_list",
    "realizations": "int",
    "seed": "int",
    "workers": "int",
    "out": "str",
    "phase_mode": "str",
    "wavelength_over_length": "optional_float",
    "cavity_phase": "float",
    "pattern_phase": "float",
    "phases": "optional_float_list",
    "addressed_ion": "optional_int",
    "amplitudes": "amplitudes",
    "gate_ideal": "bool",
    "two_photon": "bool",
    "scan_start": "optional_float",
    "scan_tolerance": "float",
    "scan_max_doublings": "int",
}

PARAMETER_KINDS = {float: "float", int: "int", bool: "bool", str: "str"}

BALANCED_AMPLITUDES = tuple(complex(v) for v in np.full(3, 1 / np.sqrt(3)))

logger = logging.getLogger(__name__)


###############################################################################
# Classes
###############################################################################
@dataclass(frozen=True)
class RunConfig:
    mode: str = "joint"
    n_ions: Tuple[int, ...] = (18,)
    realizations: int = 20
    seed: int = 0
    workers: int = 1
    out: str = "results"
    phase_mode: str = "sampled"
    wavelength_over_length: Optional[float] = None
    cavity_phase: float = 0.0
    pattern_phase: float = 0.0
    phases: Optional[Tuple[float, ...]] = None
    addressed_ion: Optional[int] = None
    amplitudes: Tuple[complex, ...] = BALANCED_AMPLITUDES
    gate_ideal: bool = False
    two_photon: bool = False
    scan_start: Optional[float] = None
    scan_tolerance: float = 1e-3
    scan_max_doublings: int = 6
    params: ProtocolParams = field(default_factory=ProtocolParams)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode '{self.mode}', expected one of {MODES}", field="mode")
        if not self.n_ions or any(n < 1 for n in self.n_ions):
            raise ConfigError(f"every N must be at least 1 (got {list(self.n_ions)})", field="N")
        for name in ("realizations", "workers", "scan_max_doublings"):
            if getattr(self, name) < 1:
                raise ConfigError("must be at least 1", field=name)
        if self.seed < 0:
            raise ConfigError("must be non-negative", field="seed")
        if len(self.amplitudes) != 3:
            raise ConfigError(f"expected 3 amplitudes (got {len(self.amplitudes)})", field="amplitudes")
        if not self.scan_tolerance > 0 or (self.scan_start is not None and not self.scan_start > 0):
            raise ConfigError("scan start and tolerance must be positive", field="scan_tolerance")
        for n in self.n_ions:
            try:
                self.geometry_inputs(n)
            except GeometryError as exc:
                raise ConfigError(str(exc), field="phase_mode") from exc

    def geometry_inputs(self, n_ions: int, realization: int = 0) -> GeometryInputs:
        return GeometryInputs(
            n_ions,
            phase_mode=self.phase_mode,
            wavelength_over_length=self.wavelength_over_length,
            cavity_phase=self.cavity_phase,
            pattern_phase=self.pattern_phase,
            seed=self.seed,
            realization=realization,
            addressed_ion=self.addressed_ion,
            phases=self.phases,
        )

    def with_overrides(self, **overrides) -> "RunConfig":
        """The configuration with the non-None overrides applied (command-line flags)."""
        kept = {name: value for name, value in overrides.items() if value is not None}
        return replace(self, **kept) if kept else self


###############################################################################
# Functions
###############################################################################
def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _coerce(key: str, value: Any, kind: str) -> Any:
    if kind.startswith("optional_"):
        return None if value is None else _coerce(key, value, kind[len("optional_") :])
    if kind == "float" and _is_number(value):
        return float(value)
    if kind == "int" and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind == "bool" and isinstance(value, bool):
        return value
    if kind == "str" and isinstance(value, str):
        return value
    if kind == "int_list":
        values = [value] if isinstance(value, int) and not isinstance(value, bool) else value
        if isinstance(values, list) and values and all(isinstance(v, int) and not isinstance(v, bool) for v in values):
            return tuple(values)
    if kind == "float_list" and isinstance(value, list) and all(_is_number(v) for v in value):
        return tuple(float(v) for v in value)
    if kind == "amplitudes" and isinstance(value, list):
        amplitudes = []
        for entry in value:
            if _is_number(entry):
                amplitudes.append(complex(entry))
            elif isinstance(entry, list) and len(entry) == 2 and all(_is_number(v) for v in entry):
                amplitudes.append(complex(entry[0], entry[1]))
            else:
                break
        else:
            return tuple(amplitudes)
    raise ConfigError(f"expected {kind.replace('_', ' ')}, got {json.dumps(value)}", field=key)


def config_from_dict(content: Dict[str, Any]) -> RunConfig:
    """Resolve a parsed configuration object against the defaults.

    Raises
    ------
    ConfigError
        For an unknown key, a value of the wrong type or an invalid value, naming the key
    """
    parameter_kinds = {f.name: PARAMETER_KINDS[f.type] for f in fields(ProtocolParams)}
    run_entries, parameter_entries = {}, {}
    for key, value in content.items():
        name = KEY_ALIASES.get(key, key)
        if name in RUN_KINDS and key not in KEY_ALIASES.values():
            run_entries[name] = _coerce(key, value, RUN_KINDS[name])
        elif key in parameter_kinds:
            parameter_entries[key] = _coerce(key, value, parameter_kinds[key])
        else:
            raise ConfigError("unknown configuration key", field=key)

    params = ProtocolParams(**parameter_entries)
    return RunConfig(params=params, **run_entries)


def load_config(input_file: pathlib.Path) -> RunConfig:
    """Load a JSON run configuration.

    Raises
    ------
    ConfigError
        With the line of a syntax error, or the key of a schema error
    """
    try:
        with open(input_file) as f_in:
            content = json.load(f_in)
    except OSError as exc:
        raise ConfigError(f"cannot read {input_file}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {input_file}: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(content, dict):
        raise ConfigError(f"{input_file} must hold a JSON object")

    cfg = config_from_dict(content)
    logger.debug("loaded %s: mode %s, N=%s, R=%d", input_file, cfg.mode, list(cfg.n_ions), cfg.realizations)
    return cfg
