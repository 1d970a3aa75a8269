"""Kalman, Wiener FIR and MLP denoisers for single-axis GPS position series,
with block-parallel FIR execution and a sampling-rate budget calculator."""

from .errors import DesignError, DivergenceError, FormatError, NumericalError, ParameterError
from .trajectory import ErrorStats, NoiseSpec, Trajectory, error_stats, generate, load_csv, save_csv

__all__ = [
    "DesignError", "DivergenceError", "FormatError", "NumericalError", "ParameterError",
    "ErrorStats", "NoiseSpec", "Trajectory", "error_stats", "generate", "load_csv", "save_csv",
]
__version__ = "0.1.0"
