"""Ring-shaped spectral density targets and phase-field reconstruction from white noise."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DomainError

DEFAULT_RESOLUTION = 500


@dataclass(frozen=True)
class SdfDescriptor:
    """Morphology of one isotropic two-phase microstructure.

    ``r_out`` and ``d_r`` are measured in frequency bins. The band covers the
    rounded radial indices ``r_in <= r <= r_out`` with ``r_in = max(0, r_out - d_r)``.
    """

    rho_m: float
    r_out: float
    d_r: float
    n: int = DEFAULT_RESOLUTION
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rho_m <= 1.0:
            raise DomainError(f"rho_m={self.rho_m} outside [0, 1]")
        if self.r_out < 0 or self.d_r < 0:
            raise DomainError("r_out and d_r must be non-negative")
        if self.n < 2:
            raise DomainError("resolution must be at least 2")
        if self.r_out >= self.n / 2:
            raise DomainError(f"r_out={self.r_out} must stay below the Nyquist radius {self.n / 2}")

    @property
    def r_in(self):
        return max(0.0, self.r_out - self.d_r)

    def to_record(self):
        return {"rho_m": float(self.rho_m), "r_out": float(self.r_out), "d_r": float(self.d_r),
                "n": int(self.n), "seed": int(self.seed)}

    @classmethod
    def from_record(cls, rec):
        return cls(rho_m=rec["rho_m"], r_out=rec["r_out"], d_r=rec["d_r"],
                   n=int(rec.get("n", DEFAULT_RESOLUTION)), seed=int(rec.get("seed", 0)))

    def to_json(self):
        return json.dumps(self.to_record())

    @classmethod
    def from_json(cls, text):
        return cls.from_record(json.loads(text))

    def replace(self, **kw):
        d = asdict(self)
        d.update(kw)
        return SdfDescriptor(**d)


@dataclass
class PhaseField:
    values: np.ndarray
    periodic: bool = True

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise DomainError("phase field contains non-finite values")

    @property
    def shape(self):
        return self.values.shape


def radial_index(n):
    """Rounded radius of every centered frequency bin of an ``n`` by ``n`` grid."""
    k = np.arange(n) - n // 2
    return np.rint(np.hypot(k[:, None], k[None, :])).astype(int)


def build_target_sdf(desc: SdfDescriptor):
    """Centered {0, 1} mask: the DC bin plus every bin with ``r_in <= r <= r_out``."""
    if desc.r_out >= desc.n / 2:
        raise DomainError("target band exceeds the Nyquist disk")
    r = radial_index(desc.n)
    mask = ((r >= desc.r_in) & (r <= desc.r_out)).astype(float)
    mask[desc.n // 2, desc.n // 2] = 1.0
    return mask


def white_noise(n, seed):
    """i.i.d. uniform [0, 1) image from numpy's PCG64 generator."""
    return np.random.default_rng(seed).random((n, n))


def reconstruct_phase_field(desc: SdfDescriptor):
    """Filter seeded white noise so its spectrum lives on the target band.

    The square root of the mask multiplies the noise spectrum and the modulus
    of the inverse transform is returned.
    """
    mask = np.fft.ifftshift(build_target_sdf(desc))
    spec = np.fft.fft2(white_noise(desc.n, desc.seed))
    return PhaseField(np.abs(np.fft.ifft2(np.sqrt(mask) * spec)), periodic=True)


def spectral_density(values):
    """Centered power spectrum ``|F[phi]|^2``."""
    return np.fft.fftshift(np.abs(np.fft.fft2(values)) ** 2)


def band_power_fraction(field: PhaseField, desc: SdfDescriptor):
    """Share of the non-DC power of ``field - mean`` that falls inside the target band."""
    S = spectral_density(field.values - field.values.mean())
    mask = build_target_sdf(desc).astype(bool)
    c = desc.n // 2
    mask[c, c] = False
    S[c, c] = 0.0
    total = S.sum()
    return 1.0 if total == 0 else float(S[mask].sum() / total)


def radial_average(S):
    """Mean of a centered spectrum over each rounded radial shell."""
    r = radial_index(S.shape[0]).ravel()
    sums = np.bincount(r, weights=S.ravel())
    counts = np.bincount(r)
    return sums / np.maximum(counts, 1)
