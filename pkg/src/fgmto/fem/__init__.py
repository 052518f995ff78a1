"""Total-Lagrangian plane-strain finite elements with Neo-Hookean constituents."""
from .assembly import Assembler, factorize
from .constitutive import (
    KinematicState,
    NeoHookeanLaw,
    cauchy_to_pk2,
    kinematics,
    linear_modulus,
    pk2_out_of_plane,
    pk2_stress,
    pk2_to_cauchy,
    stored_energy,
    tangent_modulus,
)
from .element import (
    ElementResponse,
    element_forces_and_tangent,
    interp_coefficient,
    interp_coefficient_derivative,
    kinematics_at_gauss,
)
from .mesh import QuadMesh, structured_mesh
from .newton import EquilibriumSolution, NewtonConfig, NewtonSolver, StepRecord, newton_solve

__all__ = [
    "Assembler", "factorize", "KinematicState", "NeoHookeanLaw", "cauchy_to_pk2", "kinematics",
    "linear_modulus", "pk2_out_of_plane", "pk2_stress", "pk2_to_cauchy", "stored_energy",
    "tangent_modulus", "ElementResponse", "element_forces_and_tangent", "interp_coefficient",
    "interp_coefficient_derivative", "kinematics_at_gauss", "QuadMesh", "structured_mesh",
    "EquilibriumSolution", "NewtonConfig", "NewtonSolver", "StepRecord", "newton_solve",
]
