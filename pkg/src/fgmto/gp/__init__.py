"""Dataset generation and Gaussian-process surrogates of the homogenized Lamé parameters."""
from .dataset import CSV_COLUMNS, MaterialDataset, build_dataset, deduplicate, evaluate_row
from .doe import (
    INPUT_HI, INPUT_LO, DoeSpec, denormalize_inputs, generate_doe, normalize_inputs, sobol_levels,
)
from .model import GpModel, correlation, fit_gp, rrmse
from .surrogate import LameSurrogate

__all__ = [
    "CSV_COLUMNS", "MaterialDataset", "build_dataset", "deduplicate", "evaluate_row", "INPUT_HI",
    "INPUT_LO", "DoeSpec", "denormalize_inputs", "generate_doe", "normalize_inputs",
    "sobol_levels", "GpModel", "correlation", "fit_gp", "rrmse", "LameSurrogate",
]
