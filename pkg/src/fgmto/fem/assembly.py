"""Global assembly and constrained sparse solves."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import SingularTangent


class Assembler:
    """Scatter element vectors/matrices of a mesh into global arrays.

    The COO index pattern is built once; conversion to CSR sums duplicates in
    a fixed order, so repeated assemblies are bit-identical.
    """

    def __init__(self, mesh):
        self.mesh = mesh
        self.n = mesh.n_dofs
        edofs = mesh.elem_dofs
        self.edofs = edofs
        self.rows = np.repeat(edofs, 8, axis=1).ravel()
        self.cols = np.tile(edofs, (1, 8)).ravel()
        self.free = mesh.free_dofs
        self.fixed = mesh.fixed_dofs

    def gather(self, u):
        return u[self.edofs]

    def vector(self, f_e):
        f = np.zeros(self.n)
        np.add.at(f, self.edofs.ravel(), f_e.ravel())
        return f

    def matrix(self, K_e):
        return sp.csr_matrix((K_e.ravel(), (self.rows, self.cols)), shape=(self.n, self.n))

    def partition(self, K):
        """(K_ff, K_fd) blocks for the free/fixed dof split."""
        K = K.tocsr()
        Kf = K[self.free]
        return Kf[:, self.free].tocsc(), Kf[:, self.fixed].tocsc()


def factorize(K_ff):
    """Sparse direct LU of a (symmetric) stiffness block; raises SingularTangent."""
    try:
        lu = spla.splu(K_ff.tocsc(), permc_spec="MMD_AT_PLUS_A")
    except RuntimeError as exc:  # "Factor is exactly singular"
        raise SingularTangent(str(exc)) from exc
    diag = np.abs(lu.U.diagonal())
    if not np.all(np.isfinite(diag)) or diag.min() <= 1e-14 * diag.max():
        raise SingularTangent("tangent stiffness is numerically singular")
    return lu
