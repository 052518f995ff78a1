"""Network-parameterized multiscale topology optimization with adjoint sensitivities."""
from .net import THETA_HI, THETA_LO, DesignNet, net_forward
from .optimize import (
    TRACE_COLUMNS, AdamState, OptimizationTrace, OptimizerConfig, bimodal_fraction, block_average,
    merit, optimize, transfer_infer,
)
from .problem import (
    C_MIN, Evaluation, ToProblem, adjoint_gradient, compliance, objective, penalize,
    volume_constraint,
)

__all__ = [
    "THETA_HI", "THETA_LO", "DesignNet", "net_forward", "TRACE_COLUMNS", "AdamState",
    "OptimizationTrace", "OptimizerConfig", "bimodal_fraction", "block_average", "merit",
    "optimize", "transfer_infer", "C_MIN", "Evaluation", "ToProblem", "adjoint_gradient",
    "compliance", "objective", "penalize", "volume_constraint",
]
