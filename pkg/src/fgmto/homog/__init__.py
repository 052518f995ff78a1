"""Periodic linear homogenization and isotropic projection."""
from .periodic import (
    EffectiveLame, HomogenizedTensor, extract_lame, homogenize_linear, isotropic_tensor,
    mixture_lame, plane_stress_lambda, tensor_norm, voigt_reuss_bounds,
)

__all__ = ["EffectiveLame", "HomogenizedTensor", "extract_lame", "homogenize_linear",
           "isotropic_tensor", "mixture_lame", "plane_stress_lambda", "tensor_norm", "voigt_reuss_bounds"]
