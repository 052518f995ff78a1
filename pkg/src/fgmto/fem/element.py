"""Element-level kinematics, forces and tangents with linear/Neo-Hookean energy interpolation.

Everything is vectorized over elements. Element displacement vectors have
shape ``(n_elems, 8)`` in the dof order of ``QuadMesh.elem_dofs``.

The interpolated element energy is

    Psi_int(u) = Psi_N(k u) - Psi_L(k u) + Psi_L(u)

so that ``k = 1`` recovers pure Neo-Hookean behaviour and ``k = 0`` pure small
strain elasticity with the same Lamé parameters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .constitutive import kinematics, linear_modulus, pk2_stress, stored_energy, tangent_modulus

BETA_KAPPA = 500.0
RHO_0 = 0.01


def interp_coefficient(rho_M, p, beta=BETA_KAPPA, rho0=RHO_0):
    """Heaviside-type blend between linear (0) and Neo-Hookean (1) energies."""
    rho_M = np.asarray(rho_M, dtype=float)
    if np.any((rho_M < 0.0) | (rho_M > 1.0)) or not np.all(np.isfinite(rho_M)):
        raise DomainError("rho_M must lie in [0, 1]")
    a = np.tanh(beta * rho0)
    return (a + np.tanh(beta * (rho_M**p - rho0))) / (a + np.tanh(beta * (1.0 - rho0)))


def interp_coefficient_derivative(rho_M, p, beta=BETA_KAPPA, rho0=RHO_0):
    """d kappa / d rho_M."""
    rho_M = np.asarray(rho_M, dtype=float)
    a = np.tanh(beta * rho0)
    den = a + np.tanh(beta * (1.0 - rho0))
    sech2 = 1.0 - np.tanh(beta * (rho_M**p - rho0)) ** 2
    return beta * sech2 * p * rho_M ** (p - 1.0) / den


def gradient_at_gauss(u_e, dN_dX):
    """Displacement gradients (E, G, 2, 2) from element dofs and shape gradients."""
    U = u_e.reshape(len(u_e), 4, 2)
    return np.einsum("eai,egaj->egij", U, dN_dX)


def kinematics_at_gauss(u_e, gp, mesh, elem=None):
    """Kinematic state at Gauss point ``gp`` of element ``elem`` (all elements if None).

    ``u_e`` is the element dof vector (8,) for a single element or (E, 8).
    """
    dN_dX, _ = mesh.geometry()
    if elem is not None:
        dN_dX = dN_dX[[elem]]
        u_e = np.asarray(u_e, dtype=float).reshape(1, 8)
    H = gradient_at_gauss(np.asarray(u_e, dtype=float), dN_dX[:, [gp]])[:, 0]
    kin = kinematics(np.eye(2) + H)
    if elem is not None:
        kin = type(kin)(**{k: v[0] for k, v in vars(kin).items()})
    return kin


def _b_matrix(F, dN_dX):
    """Nonlinear strain-displacement operator (E, G, 3, 8): dE_voigt = B du."""
    E, G = dN_dX.shape[:2]
    B = np.empty((E, G, 3, 4, 2))
    # dE11 = F_i1 dN_a/dX1 du_ai ; dE22 = F_i2 dN_a/dX2 du_ai
    B[:, :, 0] = dN_dX[..., :, 0, None] * F[..., None, :, 0]
    B[:, :, 1] = dN_dX[..., :, 1, None] * F[..., None, :, 1]
    B[:, :, 2] = (dN_dX[..., :, 1, None] * F[..., None, :, 0]
                  + dN_dX[..., :, 0, None] * F[..., None, :, 1])
    return B.reshape(E, G, 3, 8)


def _weighted_btdb(B, D, wdetJ):
    """sum_g w_g B_g^T D_g B_g for B (E, G, 3, 8) and D (E, G, 3, 3) or broadcastable."""
    DB = np.matmul(D, B)
    BtDB = np.matmul(np.swapaxes(B, -1, -2), DB)
    return np.einsum("eg,egij->eij", wdetJ, BtDB)


def unit_linear_stiffness(dN_dX, wdetJ):
    """Small-strain stiffness pair ``(K_mu, K_lam)`` for unit Lamé parameters.

    Any isotropic element stiffness is ``mu*K_mu + lam*K_lam``.
    """
    E = dN_dX.shape[0]
    F = np.broadcast_to(np.eye(2), (E, 4, 2, 2))
    B = _b_matrix(F, dN_dX)
    K_mu = _weighted_btdb(B, linear_modulus(1.0, 0.0), wdetJ)
    K_lam = _weighted_btdb(B, linear_modulus(0.0, 1.0), wdetJ)
    return K_mu, K_lam


def linear_stiffness(mu, lam, mesh):
    """Small-strain element stiffness (E, 8, 8)."""
    K_mu, K_lam = mesh.unit_stiffness()
    mu = np.asarray(mu, dtype=float)[:, None, None]
    lam = np.asarray(lam, dtype=float)[:, None, None]
    return mu * K_mu + lam * K_lam


def neo_hookean_response(u_e, mu, lam, dN_dX, wdetJ, tangent=True):
    """Internal force, energy and (optionally) consistent tangent of pure Neo-Hookean elements.

    Returns ``(f, K, W)`` with shapes (E, 8), (E, 8, 8) or None, and (E,).
    Raises InvertedElement if any Gauss point has ``det F <= 0``.
    """
    H = gradient_at_gauss(u_e, dN_dX)
    kin = kinematics(np.eye(2) + H)
    mu_g = np.asarray(mu, dtype=float)[:, None]
    lam_g = np.asarray(lam, dtype=float)[:, None]
    S = pk2_stress(kin, mu=mu_g, lam=lam_g)
    S_v = np.stack([S[..., 0, 0], S[..., 1, 1], S[..., 0, 1]], axis=-1)
    B = _b_matrix(kin.F, dN_dX)
    f = np.einsum("eg,egi->ei", wdetJ, np.matmul(S_v[..., None, :], B)[..., 0, :])
    W = np.einsum("eg,eg->e", wdetJ, stored_energy(kin, mu=mu_g, lam=lam_g))
    if not tangent:
        return f, None, W
    D = tangent_modulus(kin, mu=mu_g, lam=lam_g)
    K = _weighted_btdb(B, D, wdetJ)
    # initial-stress (geometric) part: dN_a . S . dN_b on both displacement components
    G = np.einsum("eg,egab->eab", wdetJ, dN_dX @ S @ np.swapaxes(dN_dX, -1, -2))
    K = K + _expand_geo(G)
    return f, K, W


def _expand_geo(G):
    E = G.shape[0]
    Kg = np.zeros((E, 4, 2, 4, 2))
    Kg[:, :, 0, :, 0] = G
    Kg[:, :, 1, :, 1] = G
    return Kg.reshape(E, 8, 8)


@dataclass
class ElementResponse:
    """Interpolated element quantities.

    ``f``/``K``/``energy`` are the interpolated internal force, tangent and
    integrated energy. The remaining fields are kept for sensitivities:
    ``f_N``/``K_N`` are evaluated at the scaled state ``kappa*u`` and
    ``K_L`` is the small-strain stiffness.
    """

    f: np.ndarray
    K: np.ndarray | None
    energy: np.ndarray
    f_N: np.ndarray
    K_N: np.ndarray | None
    K_L: np.ndarray
    u_e: np.ndarray
    kappa: np.ndarray

    def df_dkappa(self):
        """d f / d kappa = f_N(ku) + k K_N(ku) u - 2 k K_L u."""
        k = self.kappa[:, None]
        KNu = np.einsum("eij,ej->ei", self.K_N, self.u_e)
        KLu = np.einsum("eij,ej->ei", self.K_L, self.u_e)
        return self.f_N + k * KNu - 2.0 * k * KLu

    def denergy_dkappa(self):
        """d Psi_int / d kappa = f_N(ku).u - k u.K_L.u."""
        uKLu = np.einsum("ei,eij,ej->e", self.u_e, self.K_L, self.u_e)
        return np.einsum("ei,ei->e", self.f_N, self.u_e) - self.kappa * uKLu


def element_forces_and_tangent(u_e, mu, lam, kappa, mesh, tangent=True):
    """Interpolated internal force and tangent for every element.

    ``mu``, ``lam`` are the (already penalized) per-element Lamé parameters and
    ``kappa`` the per-element interpolation coefficient. Only the scaled state
    ``kappa*u`` is passed to the Neo-Hookean law, so elements with
    ``kappa ~ 0`` never raise InvertedElement.
    """
    dN_dX, wdetJ = mesh.geometry()
    u_e = np.asarray(u_e, dtype=float)
    E = len(u_e)
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (E,))
    lam = np.broadcast_to(np.asarray(lam, dtype=float), (E,))
    kappa = np.broadcast_to(np.asarray(kappa, dtype=float), (E,))
    k = kappa[:, None]
    K_L = linear_stiffness(mu, lam, mesh)
    f_N, K_N, W_N = neo_hookean_response(k * u_e, mu, lam, dN_dX, wdetJ, tangent=True)
    KLu = np.einsum("eij,ej->ei", K_L, u_e)
    f = k * f_N - k * k * KLu + KLu
    uKLu = np.einsum("ei,ei->e", u_e, KLu)
    energy = W_N - 0.5 * kappa**2 * uKLu + 0.5 * uKLu
    K = None
    if tangent:
        k2 = (kappa**2)[:, None, None]
        K = k2 * K_N + (1.0 - k2) * K_L
    return ElementResponse(f=f, K=K, energy=energy, f_N=f_N, K_N=K_N, K_L=K_L,
                           u_e=u_e, kappa=np.array(kappa))
