"""Command-line shell: experiment presets, configuration, pipelines and exporters."""
from .config import ExperimentConfig, preset_names
from .export import (
    RunRecorder, density_to_gray, read_image, read_pgm, read_theta_csv, sha256_file, write_csv, write_json,
    write_pgm, write_png, write_theta_csv,
)
from .presets import PRESETS, build_mesh, preset_defaults

__all__ = [
    "ExperimentConfig", "preset_names", "RunRecorder", "density_to_gray", "read_image", "read_pgm",
    "read_theta_csv", "sha256_file", "write_csv", "write_json", "write_pgm", "write_png",
    "write_theta_csv", "PRESETS", "build_mesh", "preset_defaults",
]
