"""Orlicz-gauge numerics and Monte Carlo verification of martingale inequalities."""

from .config import ExperimentConfig, load_config
from .lab import EXPERIMENTS, run_experiment
from .reports import emit_report

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "load_config",
    "EXPERIMENTS",
    "run_experiment",
    "emit_report",
    "__version__",
]
