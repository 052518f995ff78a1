"""Quantile level-set binarization of phase fields."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .sdf import PhaseField


@dataclass
class BinaryMicrostructure:
    """Two-phase pixel image; 1 marks the stiff constituent A."""

    pixels: np.ndarray
    rho_m: float | None = None

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 2 or self.pixels.shape[0] != self.pixels.shape[1]:
            raise DomainError("microstructure image must be square")
        if np.any(self.pixels > 1):
            raise DomainError("pixels must be 0 or 1")

    @property
    def n(self):
        return self.pixels.shape[0]

    @property
    def achieved_vf(self):
        return float(self.pixels.mean())

    def to_gray(self):
        """uint8 image, constituent A black and B white."""
        return np.where(self.pixels == 1, 0, 255).astype(np.uint8)


def cut_count(rho_m, n_pixels):
    # the tiny relative bump keeps e.g. 0.29 * 100 from flooring to 28
    return int(np.floor(rho_m * n_pixels * (1.0 + 1e-12)))


def levelset_threshold(values, rho_m):
    """Largest field value that still belongs to phase A (``-inf`` if none does)."""
    flat = np.sort(np.asarray(values, dtype=float).ravel(), kind="stable")
    k = cut_count(rho_m, flat.size)
    return -np.inf if k == 0 else float(flat[k - 1])


def levelset_cut(field: PhaseField, rho_m):
    """Mark the ``floor(rho_m N^2)`` lowest field values as phase A.

    Ties are broken by ascending flat pixel index, so the count is exact.
    """
    if not 0.0 <= rho_m <= 1.0:
        raise DomainError(f"rho_m={rho_m} outside [0, 1]")
    v = field.values.ravel()
    order = np.argsort(v, kind="stable")
    pix = np.zeros(v.size, dtype=np.uint8)
    pix[order[:cut_count(rho_m, v.size)]] = 1
    return BinaryMicrostructure(pix.reshape(field.shape), rho_m=float(rho_m))


def reconstruct(desc):
    """Descriptor to binary microstructure in one call."""
    from .sdf import reconstruct_phase_field
    return levelset_cut(reconstruct_phase_field(desc), desc.rho_m)
