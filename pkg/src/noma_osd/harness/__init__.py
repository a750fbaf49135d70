from .config import ConfigError, SimConfig, load_config, parse_config
from .exit import (
    ExitPoint,
    exit_point,
    exit_transform,
    mi_grid_to_sigma,
    measure_mi,
    mi_of_variance,
    sample_gaussian_llr,
    variance_of_mi,
)
from .ml import JointMlDecoder, joint_ml_receive, ml_decode_bruteforce
from .montecarlo import SIM_COLUMNS, SimResult, format_sim_csv, run_monte_carlo

__all__ = [
    "ConfigError", "SimConfig", "load_config", "parse_config",
    "ExitPoint", "exit_point", "exit_transform", "mi_grid_to_sigma", "measure_mi", "mi_of_variance", "sample_gaussian_llr", "variance_of_mi",
    "JointMlDecoder", "joint_ml_receive", "ml_decode_bruteforce",
    "SIM_COLUMNS", "SimResult", "format_sim_csv", "run_monte_carlo",
]
