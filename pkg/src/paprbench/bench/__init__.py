from .config import ConfigError, ExperimentConfig, parse_config, parse_sweep
from .runner import RunResult, read_csv, run_experiment, write_csv

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "parse_sweep",
    "RunResult",
    "run_experiment",
    "write_csv",
    "read_csv",
]
