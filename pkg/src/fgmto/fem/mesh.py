"""Structured bilinear quadrilateral meshes with boundary-condition tags."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import DomainError

# 2x2 Gauss rule on the reference square [-1, 1]^2
_G = 1.0 / np.sqrt(3.0)
GAUSS_POINTS = np.array([[-_G, -_G], [_G, -_G], [_G, _G], [-_G, _G]])
GAUSS_WEIGHTS = np.ones(4)

# reference corner coordinates, counter-clockwise
_XI_NODES = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def shape_gradients_ref(xi, eta):
    """dN_a/d(xi, eta) for the four bilinear shape functions, shape (4, 2)."""
    return 0.25 * np.column_stack([
        _XI_NODES[:, 0] * (1.0 + _XI_NODES[:, 1] * eta),
        _XI_NODES[:, 1] * (1.0 + _XI_NODES[:, 0] * xi),
    ])


def shape_values_ref(xi, eta):
    return 0.25 * (1.0 + _XI_NODES[:, 0] * xi) * (1.0 + _XI_NODES[:, 1] * eta)


@dataclass
class QuadMesh:
    """Structured ``nx`` by ``ny`` mesh of bilinear quads.

    Nodes are numbered row by row (x fastest): node ``j*(nx+1) + i`` sits at
    ``(i*hx, j*hy)``. Element ``j*nx + i`` has counter-clockwise nodes starting
    at its lower-left corner. Degree of freedom ``2*node + c`` is the ``c``
    displacement component of ``node``.

    Boundary conditions live on the mesh as flat dof arrays. ``fixed_values``
    and ``load_values`` are the full-load magnitudes; the Newton driver scales
    both by the pseudo-time.
    """

    nx: int
    ny: int
    node_coords: np.ndarray
    elem_nodes: np.ndarray
    fixed_dofs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    fixed_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    load_dofs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    load_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.fixed_dofs = np.asarray(self.fixed_dofs, dtype=np.int64)
        self.fixed_values = np.asarray(self.fixed_values, dtype=float)
        self.load_dofs = np.asarray(self.load_dofs, dtype=np.int64)
        self.load_values = np.asarray(self.load_values, dtype=float)
        if self.fixed_dofs.shape != self.fixed_values.shape:
            raise DomainError("fixed_dofs and fixed_values differ in length")
        if self.load_dofs.shape != self.load_values.shape:
            raise DomainError("load_dofs and load_values differ in length")
        if len(np.unique(self.fixed_dofs)) != len(self.fixed_dofs):
            raise DomainError("duplicate Dirichlet dof")
        if np.intersect1d(self.fixed_dofs, self.load_dofs).size:
            raise DomainError("a dof carries both a Dirichlet and a Neumann condition")
        self._geometry = None
        self._unit_stiffness = None

    # ------------------------------------------------------------------ sizes
    @property
    def n_nodes(self):
        return len(self.node_coords)

    @property
    def n_elems(self):
        return len(self.elem_nodes)

    @property
    def n_dofs(self):
        return 2 * self.n_nodes

    @property
    def elem_dofs(self):
        """(n_elems, 8) global dof indices, ordered (node0 x, node0 y, node1 x, ...)."""
        return (2 * self.elem_nodes[:, :, None] + np.arange(2)).reshape(self.n_elems, 8)

    @property
    def free_dofs(self):
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.fixed_dofs] = False
        return np.flatnonzero(mask)

    # --------------------------------------------------------------- geometry
    def geometry(self):
        """Cached ``(dN_dX, wdetJ)`` with shapes (n_elems, 4, 4, 2) and (n_elems, 4).

        Raises DomainError if any reference Jacobian is non-positive.
        """
        if self._geometry is None:
            X = self.node_coords[self.elem_nodes]  # (E, 4, 2)
            dN_dX = np.empty((self.n_elems, 4, 4, 2))
            wdetJ = np.empty((self.n_elems, 4))
            for g, (xi, eta) in enumerate(GAUSS_POINTS):
                dN = shape_gradients_ref(xi, eta)  # (4, 2)
                jac = np.einsum("eai,aj->eij", X, dN)  # dX_i/dxi_j
                det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
                if np.any(det <= 0.0):
                    raise DomainError("non-positive reference Jacobian")
                inv = np.linalg.inv(jac)
                dN_dX[:, g] = np.einsum("aj,eji->eai", dN, inv)
                wdetJ[:, g] = GAUSS_WEIGHTS[g] * det
            self._geometry = (dN_dX, wdetJ)
        return self._geometry

    def unit_stiffness(self):
        """Cached small-strain element stiffnesses for unit (mu, lam); see element.unit_linear_stiffness."""
        if self._unit_stiffness is None:
            from .element import unit_linear_stiffness
            self._unit_stiffness = unit_linear_stiffness(*self.geometry())
        return self._unit_stiffness

    @property
    def elem_area(self):
        return self.geometry()[1].sum(axis=1)

    @property
    def centroids(self):
        return self.node_coords[self.elem_nodes].mean(axis=1)

    def normalized_centroids(self):
        """Element centroids mapped affinely onto [0, 1]^2 by the domain bounding box."""
        lo = self.node_coords.min(axis=0)
        span = self.node_coords.max(axis=0) - lo
        return (self.centroids - lo) / span

    # -------------------------------------------------------------- node query
    def node_at(self, i, j):
        return j * (self.nx + 1) + i

    def nodes_where(self, predicate):
        x, y = self.node_coords.T
        return np.flatnonzero(predicate(x, y))

    def nearest_node(self, point):
        """Node closest to ``point``; ties go to the lower index."""
        d = np.linalg.norm(self.node_coords - np.asarray(point, dtype=float), axis=1)
        return int(np.flatnonzero(np.isclose(d, d.min()))[0])

    def with_bcs(self, fixed_dofs=(), fixed_values=None, load_dofs=(), load_values=None):
        fixed_dofs = np.asarray(fixed_dofs, dtype=np.int64)
        load_dofs = np.asarray(load_dofs, dtype=np.int64)
        if fixed_values is None:
            fixed_values = np.zeros(len(fixed_dofs))
        if load_values is None:
            load_values = np.zeros(len(load_dofs))
        return replace(self, fixed_dofs=fixed_dofs, fixed_values=fixed_values,
                       load_dofs=load_dofs, load_values=load_values)

    def external_force(self, scale=1.0):
        f = np.zeros(self.n_dofs)
        np.add.at(f, self.load_dofs, scale * self.load_values)
        return f


def structured_mesh(nx, ny, lx=None, ly=None):
    """Rectangular ``nx`` by ``ny`` mesh; element sides default to unit length."""
    if nx < 1 or ny < 1:
        raise DomainError("mesh needs at least one element per axis")
    lx = float(nx if lx is None else lx)
    ly = float(ny if ly is None else ly)
    xs = np.linspace(0.0, lx, nx + 1)
    ys = np.linspace(0.0, ly, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    coords = np.column_stack([X.ravel(), Y.ravel()])
    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    n0 = (j * (nx + 1) + i).ravel()
    elems = np.column_stack([n0, n0 + 1, n0 + nx + 2, n0 + nx + 1])
    return QuadMesh(nx=nx, ny=ny, node_coords=coords, elem_nodes=elems)
