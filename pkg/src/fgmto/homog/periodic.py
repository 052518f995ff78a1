"""Linear homogenization of periodic pixel microstructures."""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..errors import NonPhysical, SingularSystem, SingularTangent
from ..fem.assembly import factorize
from ..fem.constitutive import linear_modulus
from ..fem.element import unit_linear_stiffness
from ..fem.mesh import structured_mesh

# unit test strains in Voigt form (11, 22, engineering 12)
TEST_STRAINS = np.eye(3)


@dataclass
class HomogenizedTensor:
    """Effective plane-strain stiffness in Voigt order (11, 22, 12)."""

    C: np.ndarray

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=float).reshape(3, 3)

    def to_record(self):
        lame = extract_lame(self)
        return {"c_voigt": self.C.tolist(), "mu_m": lame.mu_m, "lambda_m": lame.lambda_m,
                "isotropy_error": lame.isotropy_error, "norm": tensor_norm(self)}

    def to_json(self):
        return json.dumps(self.to_record())

    @classmethod
    def from_record(cls, rec):
        return cls(np.array(rec["c_voigt"]))


@dataclass(frozen=True)
class EffectiveLame:
    mu_m: float
    lambda_m: float
    isotropy_error: float = 0.0


@lru_cache(maxsize=1)
def _unit_pixel():
    """Unit-square element stiffnesses for (mu, lam) = (1, 0) and (0, 1), plus node offsets."""
    mesh = structured_mesh(1, 1)
    K_mu, K_lam = unit_linear_stiffness(*mesh.geometry())
    corners = mesh.node_coords[mesh.elem_nodes[0]]  # (4, 2) local node coordinates
    return K_mu[0], K_lam[0], corners


def _affine_displacements(corners):
    """Element dof vectors (8, 3) of u0 = eps . X for the three unit test strains."""
    U = np.zeros((8, 3))
    for k, e in enumerate(TEST_STRAINS):
        eps = np.array([[e[0], 0.5 * e[2]], [0.5 * e[2], e[1]]])
        U[:, k] = (corners @ eps.T).ravel()
    return U


def _periodic_dofs(n):
    """(n*n, 8) element dofs on an n-by-n torus of nodes, x fastest."""
    j, i = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    node = lambda jj, ii: (jj % n) * n + (ii % n)
    nodes = np.stack([node(j, i), node(j, i + 1), node(j + 1, i + 1), node(j + 1, i)], axis=-1)
    nodes = nodes.reshape(-1, 4)
    return (2 * nodes[:, :, None] + np.arange(2)).reshape(-1, 8)


def plane_stress_lambda(mu, lam):
    """First Lamé parameter that makes the plane-strain formulas describe plane stress."""
    return 2.0 * mu * lam / (lam + 2.0 * mu)


def homogenize_linear(micro, law_a, law_b, return_fluctuations=False, condition="plane_strain"):
    """Effective stiffness of a periodic binary image by the mutual-energy average.

    Pixel value 1 takes ``law_a`` and 0 takes ``law_b``; both enter through
    their initial Lamé parameters. Pixel row index maps to ``y`` and column
    index to ``x``. One node is pinned to remove the rigid translation.
    ``condition="plane_stress"`` swaps in the plane-stress constituent
    stiffness (diagnostic use; the rest of the package is plane strain).
    """
    if condition not in ("plane_strain", "plane_stress"):
        raise ValueError(f"unknown condition {condition!r}")
    pix = np.asarray(micro.pixels if hasattr(micro, "pixels") else micro)
    n = pix.shape[0]
    k_mu, k_lam, corners = _unit_pixel()
    is_a = pix.ravel() == 1
    lam_a, lam_b = law_a.lambda0, law_b.lambda0
    if condition == "plane_stress":
        lam_a = plane_stress_lambda(law_a.mu0, lam_a)
        lam_b = plane_stress_lambda(law_b.mu0, lam_b)
    mu = np.where(is_a, law_a.mu0, law_b.mu0)
    lam = np.where(is_a, lam_a, lam_b)
    Ke = mu[:, None, None] * k_mu + lam[:, None, None] * k_lam
    U0 = _affine_displacements(corners)

    edofs = _periodic_dofs(n)
    ndof = 2 * n * n
    rows = np.repeat(edofs, 8, axis=1).ravel()
    cols = np.tile(edofs, (1, 8)).ravel()
    K = sp.csr_matrix((Ke.ravel(), (rows, cols)), shape=(ndof, ndof))
    F = np.zeros((ndof, 3))
    np.add.at(F, edofs, np.einsum("eij,jk->eik", Ke, U0))

    free = np.arange(2, ndof)
    Kff = K[free][:, free]
    try:
        lu = factorize(Kff)
    except SingularTangent as exc:
        raise SingularSystem(f"periodic cell stiffness is singular: {exc}") from None
    chi = np.zeros((ndof, 3))
    chi[free] = lu.solve(F[free])

    UA = U0[None] - chi[edofs]  # (E, 8, 3)
    C = np.einsum("eik,eij,ejl->kl", UA, Ke, UA) / (n * n)
    C = 0.5 * (C + C.T)
    if return_fluctuations:
        return HomogenizedTensor(C), chi
    return HomogenizedTensor(C)


def _mandel(C):
    w = np.array([1.0, 1.0, 2.0 ** 0.5])
    return C * np.outer(w, w)


def isotropic_tensor(mu, lam):
    return linear_modulus(mu, lam)


def extract_lame(C_H):
    """Closest isotropic tensor in the Mandel Frobenius norm.

    Exactly isotropic input returns ``mu = C33`` and ``lam = C12``.
    """
    C = C_H.C if isinstance(C_H, HomogenizedTensor) else np.asarray(C_H, dtype=float)
    mu = (C[0, 0] + C[1, 1] - 2.0 * C[0, 1] + 4.0 * C[2, 2]) / 8.0
    lam = (C[0, 0] + C[1, 1] + 2.0 * C[0, 1]) / 4.0 - mu
    if not mu > 0:
        raise NonPhysical(f"projected shear modulus {mu:.3e} is not positive")
    M = _mandel(C)
    err = np.linalg.norm(M - _mandel(isotropic_tensor(mu, lam))) / np.linalg.norm(M)
    return EffectiveLame(float(mu), float(lam), float(err))


def mixture_lame(coeffs, laws):
    """Weighted sum of constituent Lamé parameters."""
    coeffs = np.asarray(coeffs, dtype=float)
    mu = float(sum(c * law.mu0 for c, law in zip(coeffs, laws)))
    lam = float(sum(c * law.lambda0 for c, law in zip(coeffs, laws)))
    return EffectiveLame(mu, lam, 0.0)


def tensor_norm(C_H):
    """Root sum of squares of the six independent Voigt entries."""
    C = C_H.C if isinstance(C_H, HomogenizedTensor) else np.asarray(C_H, dtype=float)
    iu = np.triu_indices(3)
    return float(np.sqrt(np.sum(C[iu] ** 2)))


def voigt_reuss_bounds(vf_a, law_a, law_b):
    """Arithmetic and harmonic (matrix) averages of the constituent stiffnesses."""
    Da = linear_modulus(law_a.mu0, law_a.lambda0)
    Db = linear_modulus(law_b.mu0, law_b.lambda0)
    voigt = vf_a * Da + (1 - vf_a) * Db
    reuss = np.linalg.inv(vf_a * np.linalg.inv(Da) + (1 - vf_a) * np.linalg.inv(Db))
    return voigt, reuss
