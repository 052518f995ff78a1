"""Design of experiments over the microstructure descriptors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from ..errors import DomainError

RHO_RANGE = (0.3, 0.7)
R_OUT_RANGE = (15, 25)
DR_RANGE = (0, 25)
INPUT_LO = np.array([RHO_RANGE[0], R_OUT_RANGE[0], DR_RANGE[0]], dtype=float)
INPUT_HI = np.array([RHO_RANGE[1], R_OUT_RANGE[1], DR_RANGE[1]], dtype=float)


@dataclass(frozen=True)
class DoeSpec:
    """Sobol levels for rho_m crossed with the full integer grid of (R_out, dR)."""

    n_rho: int = 4
    seed: int = 0
    count: int | None = None
    rho_range: tuple = RHO_RANGE
    r_out_range: tuple = R_OUT_RANGE
    dr_range: tuple = DR_RANGE

    def __post_init__(self):
        if self.n_rho < 1:
            raise DomainError("n_rho must be positive")
        for lo, hi in (self.rho_range, self.r_out_range, self.dr_range):
            if hi < lo:
                raise DomainError(f"empty range [{lo}, {hi}]")
        if self.count is not None and self.count < 0:
            raise DomainError("count must be non-negative")


def sobol_levels(n, lo, hi, seed):
    """``n`` scrambled Sobol points in [lo, hi], in generation order."""
    s = qmc.Sobol(d=1, scramble=True, seed=seed)
    m = int(np.ceil(np.log2(max(n, 1))))
    pts = s.random_base2(m)[:n, 0]
    return lo + (hi - lo) * pts


def generate_doe(spec: DoeSpec):
    """Raw ``(rho_m, R_out, dR)`` rows, shape (n, 3); subsampled when ``spec.count`` is set."""
    rho = sobol_levels(spec.n_rho, *spec.rho_range, seed=spec.seed)
    r_out = np.arange(spec.r_out_range[0], spec.r_out_range[1] + 1)
    dr = np.arange(spec.dr_range[0], spec.dr_range[1] + 1)
    R, D = np.meshgrid(r_out, dr, indexing="ij")
    grid = np.column_stack([R.ravel(), D.ravel()]).astype(float)
    rows = np.column_stack([np.repeat(rho, len(grid)), np.tile(grid, (len(rho), 1))])
    if spec.count is not None and spec.count < len(rows):
        rng = np.random.default_rng(spec.seed)
        rows = rows[np.sort(rng.choice(len(rows), spec.count, replace=False))]
    return rows


def normalize_inputs(raw, lo=INPUT_LO, hi=INPUT_HI):
    return (np.asarray(raw, dtype=float) - lo) / (hi - lo)


def denormalize_inputs(s, lo=INPUT_LO, hi=INPUT_HI):
    return lo + np.asarray(s, dtype=float) * (hi - lo)
