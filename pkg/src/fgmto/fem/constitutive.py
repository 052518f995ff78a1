"""Compressible Neo-Hookean law in plane strain.

All functions broadcast over leading axes: a deformation gradient of shape
``(..., 2, 2)`` gives energies of shape ``(...)``, stresses ``(..., 2, 2)`` and
Voigt moduli ``(..., 3, 3)``. Voigt order is (11, 22, 12) with engineering
shear strain, so ``S_voigt = D @ (E11, E22, 2*E12)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InvertedElement

VOIGT_PAIRS = ((0, 0), (1, 1), (0, 1))


@dataclass(frozen=True)
class NeoHookeanLaw:
    mu0: float
    lambda0: float

    def __post_init__(self):
        if not (self.mu0 > 0 and self.lambda0 > 0):
            raise DomainError(f"Lamé parameters must be positive, got {self.mu0}, {self.lambda0}")


@dataclass
class KinematicState:
    """Finite-strain measures derived from a (batch of) 2x2 deformation gradient(s).

    The out-of-plane stretch is fixed at one, so ``I1 = C11 + C22 + 1`` and
    ``J = det F`` of the in-plane block.
    """

    F: np.ndarray
    J: np.ndarray
    C: np.ndarray
    E: np.ndarray
    I1: np.ndarray

    @property
    def C_inv(self):
        return _inv2(self.C)


def _det2(A):
    return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]


def _inv2(A):
    det = _det2(A)
    inv = np.empty_like(A)
    inv[..., 0, 0] = A[..., 1, 1]
    inv[..., 1, 1] = A[..., 0, 0]
    inv[..., 0, 1] = -A[..., 0, 1]
    inv[..., 1, 0] = -A[..., 1, 0]
    return inv / det[..., None, None]


def kinematics(F):
    """Build the kinematic state for deformation gradient(s) ``F``.

    Raises InvertedElement when any ``det F <= 0``.
    """
    F = np.asarray(F, dtype=float)
    J = _det2(F)
    if np.any(~(J > 0.0)):
        raise InvertedElement(f"det(F) <= 0 (min {np.min(J):.3e})")
    C = np.swapaxes(F, -1, -2) @ F
    E = 0.5 * (C - np.eye(2))
    I1 = C[..., 0, 0] + C[..., 1, 1] + 1.0
    return KinematicState(F=F, J=J, C=C, E=E, I1=I1)


def kinematics_from_gradient(grad_u):
    """State for displacement gradient ``du/dX``; ``F = I + du/dX``."""
    return kinematics(np.eye(2) + np.asarray(grad_u, dtype=float))


def _params(law, mu=None, lam=None):
    if law is not None:
        return law.mu0, law.lambda0
    return mu, lam


def stored_energy(kin, law=None, *, mu=None, lam=None):
    """Energy density ``0.5*lam*ln(J)^2 - mu*ln(J) + 0.5*mu*(I1 - 3)``.

    ``mu``/``lam`` may be given as arrays broadcasting against ``kin.J`` in place
    of a ``NeoHookeanLaw``.
    """
    mu, lam = _params(law, mu, lam)
    lnJ = np.log(kin.J)
    return 0.5 * lam * lnJ**2 - mu * lnJ + 0.5 * mu * (kin.I1 - 3.0)


def pk2_stress(kin, law=None, *, mu=None, lam=None):
    """In-plane second Piola-Kirchhoff stress ``lam*ln(J)*C^-1 + mu*(I - C^-1)``."""
    mu, lam = _params(law, mu, lam)
    mu = np.asarray(mu, dtype=float)[..., None, None]
    lam = np.asarray(lam, dtype=float)[..., None, None]
    Ci = kin.C_inv
    lnJ = np.log(kin.J)[..., None, None]
    return lam * lnJ * Ci + mu * (np.eye(2) - Ci)


def pk2_out_of_plane(kin, law=None, *, mu=None, lam=None):
    """S33 implied by the plane-strain constraint (C33 = 1)."""
    mu, lam = _params(law, mu, lam)
    return lam * np.log(kin.J)


def tangent_modulus(kin, law=None, *, mu=None, lam=None):
    """Voigt form (..., 3, 3) of the material tangent dS/dE.

    ``C_ijkl = lam Ci_ij Ci_kl + mu' (Ci_ik Ci_jl + Ci_il Ci_kj)`` with
    ``mu' = mu - lam ln J``.
    """
    mu, lam = _params(law, mu, lam)
    Ci = kin.C_inv
    lam = np.asarray(lam, dtype=float)
    mu_eff = np.asarray(mu, dtype=float) - lam * np.log(kin.J)
    D = np.empty(kin.J.shape + (3, 3))
    for a, (i, j) in enumerate(VOIGT_PAIRS):
        for b, (k, l) in enumerate(VOIGT_PAIRS):
            D[..., a, b] = (lam * Ci[..., i, j] * Ci[..., k, l]
                            + mu_eff * (Ci[..., i, k] * Ci[..., j, l]
                                        + Ci[..., i, l] * Ci[..., k, j]))
    return D


def linear_modulus(mu, lam):
    """Isotropic plane-strain Voigt stiffness for small strains."""
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    D = np.zeros(np.broadcast(mu, lam).shape + (3, 3))
    D[..., 0, 0] = D[..., 1, 1] = lam + 2.0 * mu
    D[..., 0, 1] = D[..., 1, 0] = lam
    D[..., 2, 2] = mu
    return D


def pk2_to_cauchy(S, kin):
    """Push-forward ``sigma = J^-1 F S F^T``."""
    F = kin.F
    return F @ S @ np.swapaxes(F, -1, -2) / kin.J[..., None, None]


def cauchy_to_pk2(sigma, kin):
    """Pull-back ``S = J F^-1 sigma F^-T``."""
    Fi = _inv2(kin.F)
    return kin.J[..., None, None] * Fi @ sigma @ np.swapaxes(Fi, -1, -2)


def to_voigt(T):
    """Symmetric (..., 2, 2) stress to (..., 3) Voigt vector."""
    return np.stack([T[..., 0, 0], T[..., 1, 1], T[..., 0, 1]], axis=-1)
