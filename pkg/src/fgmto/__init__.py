"""Multiscale topology optimization of soft functionally graded structures.

Subpackages
-----------
fem      total-Lagrangian Neo-Hookean finite elements and the adaptive Newton solver
micro    spectral-density microstructure reconstruction, level-set cut, tile blending
homog    periodic linear homogenization and isotropic projection
gp       design of experiments, Lamé dataset, Gaussian-process surrogate
topopt   neural design parameterization, adjoint sensitivities, outer optimizer
shell    command-line entry point, presets and exporters
"""

__version__ = "0.1.0"

# Initial Lamé parameters of the two constituents (A is the stiffer one).
MU_A, LAMBDA_A = 3.70e8, 8.64e8
MU_B, LAMBDA_B = 3.70e7, 8.64e7
