"""Stochastic two-phase microstructures from ring-shaped spectral density targets."""
from .blend import (
    SOFT, STIFF, VOID, BlendConfig, amplification, blend_interfaces, derive_seed, interface_weight,
    labels_to_gray, render_graded_assembly, seam_mismatch, tile_descriptor, tile_descriptors,
)
from .levelset import BinaryMicrostructure, levelset_cut, levelset_threshold, reconstruct
from .sdf import (
    DEFAULT_RESOLUTION, PhaseField, SdfDescriptor, band_power_fraction, build_target_sdf,
    radial_average, radial_index, reconstruct_phase_field, spectral_density, white_noise,
)

__all__ = [
    "SOFT", "STIFF", "VOID", "BlendConfig", "amplification", "blend_interfaces", "derive_seed",
    "interface_weight", "labels_to_gray", "render_graded_assembly", "seam_mismatch",
    "tile_descriptor", "tile_descriptors", "BinaryMicrostructure", "levelset_cut", "levelset_threshold",
    "reconstruct", "DEFAULT_RESOLUTION", "PhaseField", "SdfDescriptor", "band_power_fraction",
    "build_target_sdf", "radial_average", "radial_index", "reconstruct_phase_field",
    "spectral_density", "white_noise",
]
