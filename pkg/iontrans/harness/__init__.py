from .model import SweepRow, AggregateRow, SweepResult, OracleResult
from .config import MODES, RunConfig, config_from_dict, load_config
from .sweep import point_entry_dict, evaluate_point, aggregate_rows, run_sweep, write_outputs
from .oracles import oracle_entry_dict, landau_zener_survival, run_oracle_suite
from .modes import ModeRunner, mode_entry_dict

__all__ = [
    "SweepRow",
    "AggregateRow",
    "SweepResult",
    "OracleResult",
    "MODES",
    "RunConfig",
    "config_from_dict",
    "load_config",
    "point_entry_dict",
    "evaluate_point",
    "aggregate_rows",
    "run_sweep",
    "write_outputs",
    "oracle_entry_dict",
    "landau_zener_survival",
    "run_oracle_suite",
    "ModeRunner",
    "mode_entry_dict",
]
