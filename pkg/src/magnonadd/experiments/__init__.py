"""Figure data, protocol runs and validation reports driven by a JSON config."""
from .config import ConfigError, ExperimentConfig, FigureId, config_from_dict, load_config
from .figures import FIGURES, run_figure
from .protocol import run_protocol
from .sweep import run_sweep
from .validation import ValidationReport, validate

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "FIGURES",
    "FigureId",
    "ValidationReport",
    "config_from_dict",
    "load_config",
    "run_figure",
    "run_protocol",
    "run_sweep",
    "validate",
]
