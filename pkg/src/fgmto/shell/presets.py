"""Benchmark geometries and boundary conditions."""
from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..fem.mesh import structured_mesh

# Each preset fixes the mesh, the supports, the loaded node and the load kind.
# Loads act in -y: a downward force F or a downward prescribed displacement D.
PRESETS = {
    "cantilever": {
        "nx": 80, "ny": 20, "supports": ["left"], "load_at": "bottom_right",
        "load_kind": "force", "magnitude": 1e5, "objective": "J1",
    },
    "double_clamped": {
        "nx": 60, "ny": 20, "supports": ["left", "right"], "load_at": "top_center",
        "load_kind": "displacement", "magnitude": 5.0, "objective": "J2",
    },
    "square_beam": {
        "nx": 40, "ny": 40, "supports": ["left"], "load_at": "right_center",
        "load_kind": "displacement", "magnitude": 10.0, "objective": "J2",
    },
}

EDGES = {
    "left": lambda m: m.nodes_where(lambda x, y: np.isclose(x, 0.0)),
    "right": lambda m: m.nodes_where(lambda x, y: np.isclose(x, x.max())),
    "bottom": lambda m: m.nodes_where(lambda x, y: np.isclose(y, 0.0)),
    "top": lambda m: m.nodes_where(lambda x, y: np.isclose(y, y.max())),
}

POINTS = {
    "bottom_right": lambda m: m.node_at(m.nx, 0),
    "top_center": lambda m: m.node_at(m.nx // 2, m.ny),
    "right_center": lambda m: m.node_at(m.nx, m.ny // 2),
    "bottom_center": lambda m: m.node_at(m.nx // 2, 0),
    "top_right": lambda m: m.node_at(m.nx, m.ny),
}


def preset_defaults(name):
    if name not in PRESETS:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return dict(PRESETS[name])


def build_mesh(nx, ny, supports, load_at, load_kind, magnitude):
    """Unit-element mesh with clamped support edges and one vertically loaded node."""
    if load_kind not in ("force", "displacement"):
        raise DomainError(f"load kind must be 'force' or 'displacement', got {load_kind!r}")
    for key, table in ((load_at, POINTS), *((s, EDGES) for s in supports)):
        if key not in table:
            raise DomainError(f"unknown location {key!r}; choose from {sorted(table)}")
    mesh = structured_mesh(int(nx), int(ny))
    clamped = np.unique(np.concatenate([EDGES[s](mesh) for s in supports]))
    fixed = np.sort(np.r_[2 * clamped, 2 * clamped + 1])
    load_dof = 2 * POINTS[load_at](mesh) + 1
    if load_kind == "force":
        return mesh.with_bcs(fixed, None, [load_dof], [-float(magnitude)])
    if load_dof in fixed:
        raise DomainError("the displaced node lies on a clamped edge")
    dofs = np.r_[fixed, load_dof]
    values = np.r_[np.zeros(len(fixed)), -float(magnitude)]
    order = np.argsort(dofs)
    return mesh.with_bcs(dofs[order], values[order])
