"""Design evaluation: parameterization, surrogate moduli, penalization, equilibrium and adjoint gradients."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import LAMBDA_A, LAMBDA_B, MU_A, MU_B
from ..errors import DomainError, NotConverged
from ..fem.constitutive import NeoHookeanLaw
from ..fem.element import element_forces_and_tangent, interp_coefficient, interp_coefficient_derivative
from ..fem.newton import NewtonConfig, newton_solve

C_MIN = 1e-6
MODES = ("linear", "single_scale", "multiscale")
OBJECTIVES = ("J1", "J2")


def penalize(mu_m, lambda_m, rho_M, p, c_min=C_MIN):
    """``(C - C_min) rho^p + C_min`` with ``C_min = c_min C``, for both Lamé parameters."""
    rho_M = np.asarray(rho_M, dtype=float)
    if np.any((rho_M < 0) | (rho_M > 1)):
        raise DomainError("rho_M must lie in [0, 1]")
    s = c_min + (1.0 - c_min) * rho_M**p
    return np.asarray(mu_m) * s, np.asarray(lambda_m) * s


def penalty_scale_derivative(rho_M, p, c_min=C_MIN):
    return (1.0 - c_min) * p * np.asarray(rho_M, dtype=float) ** (p - 1.0)


def volume_constraint(theta, mesh, rho_t=0.3, single_scale=False):
    """Relative excess of stiff-constituent volume over the target; returns ``(g, dg/dtheta)``."""
    theta = np.asarray(theta, dtype=float)
    A = mesh.elem_area
    rho_M = theta[:, 0]
    rho_m = np.ones_like(rho_M) if single_scale else theta[:, 1]
    denom = rho_t * A.sum()
    g = float(np.sum(rho_M * rho_m * A) / denom - 1.0)
    grad = np.zeros_like(theta)
    grad[:, 0] = rho_m * A / denom
    if not single_scale:
        grad[:, 1] = rho_M * A / denom
    return g, grad


def compliance(solution, mesh):
    """External work including the reactions at prescribed non-zero displacements."""
    u_D = mesh.fixed_values
    return float(solution.f_ext @ solution.u + solution.f_int[mesh.fixed_dofs] @ u_D)


def objective(kind, solution, mesh):
    """J1: compliance. J2: integrated interpolated energy minus the work of applied forces."""
    if kind == "J1":
        return compliance(solution, mesh)
    if kind == "J2":
        return float(solution.response.energy.sum() - solution.f_ext @ solution.u)
    raise DomainError(f"unknown objective {kind!r}")


@dataclass
class Evaluation:
    theta: np.ndarray
    p: float
    solution: object
    J: float
    target: float
    compliance: float
    g: float
    grad_target: np.ndarray | None = None
    grad_g: np.ndarray | None = None
    moduli: tuple = ()
    kappa: np.ndarray | None = None


@dataclass
class ToProblem:
    """Design problem on a mesh whose boundary conditions are already attached.

    ``mode`` selects ``'linear'`` (small strain, single scale),
    ``'single_scale'`` (hyperelastic constituent A only) or ``'multiscale'``
    (GP surrogate moduli). The loop minimizes ``target``: J1 itself or the
    negative of J2.
    """

    mesh: object
    objective: str = "J1"
    mode: str = "multiscale"
    rho_t: float = 0.3
    law_a: NeoHookeanLaw = field(default_factory=lambda: NeoHookeanLaw(MU_A, LAMBDA_A))
    law_b: NeoHookeanLaw = field(default_factory=lambda: NeoHookeanLaw(MU_B, LAMBDA_B))
    surrogate: object = None
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    c_min: float = C_MIN

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if self.objective not in OBJECTIVES:
            raise DomainError(f"objective must be one of {OBJECTIVES}")
        if self.mode == "multiscale" and self.surrogate is None:
            raise DomainError("multiscale mode needs a Lamé surrogate")
        self._X = self.mesh.normalized_centroids()

    @property
    def single_scale(self):
        return self.mode != "multiscale"

    @property
    def centroids(self):
        return self._X

    # ------------------------------------------------------------- forward
    def base_moduli(self, theta):
        """Unpenalized moduli and their derivatives with respect to (rho_m, R_out, dR)."""
        E = len(theta)
        if self.single_scale:
            z = np.zeros((E, 3))
            return np.full(E, self.law_a.mu0), np.full(E, self.law_a.lambda0), z, z
        return self.surrogate.evaluate(theta[:, 1:])

    def kappa(self, rho_M, p):
        if self.mode == "linear":
            return np.zeros_like(rho_M)
        return interp_coefficient(rho_M, p)

    def evaluate(self, net, p, gradient=True):
        theta = net.forward(self._X)
        ev = self.evaluate_theta(theta, p, gradient)
        if gradient:
            ev.grad_target = net.vjp(self._X, ev.grad_target)
            ev.grad_g = net.vjp(self._X, ev.grad_g)
        return ev

    def evaluate_theta(self, theta, p, gradient=True):
        """Solve and score a design field; gradients are with respect to theta (E, 4)."""
        mesh = self.mesh
        rho_M = theta[:, 0]
        mu_m, lam_m, dmu, dlam = self.base_moduli(theta)
        mu_t, lam_t = penalize(mu_m, lam_m, rho_M, p, self.c_min)
        kappa = self.kappa(rho_M, p)
        sol = newton_solve(mesh, mu_t, lam_t, kappa, self.newton, linear=self.mode == "linear")
        J = objective(self.objective, sol, mesh)
        sign = 1.0 if self.objective == "J1" else -1.0
        g, dg = volume_constraint(theta, mesh, self.rho_t, self.single_scale)
        ev = Evaluation(theta=theta, p=p, solution=sol, J=J, target=sign * J,
                        compliance=compliance(sol, mesh), g=g, grad_g=dg,
                        moduli=(mu_t, lam_t), kappa=kappa)
        if gradient:
            g_mu_t, g_lam_t, g_kappa = self.moduli_sensitivities(sol)
            s = self.c_min + (1.0 - self.c_min) * rho_M**p
            ds = penalty_scale_derivative(rho_M, p, self.c_min)
            gt = np.zeros_like(theta)
            gt[:, 0] = g_mu_t * mu_m * ds + g_lam_t * lam_m * ds
            if self.mode != "linear":
                gt[:, 0] += g_kappa * interp_coefficient_derivative(rho_M, p)
            if not self.single_scale:
                gt[:, 1:] = (g_mu_t * s)[:, None] * dmu + (g_lam_t * s)[:, None] * dlam
            ev.grad_target = sign * gt
        return ev

    # ------------------------------------------------------------- adjoint
    def adjoint_weights(self, sol):
        """Vector ``w`` with ``dJ/dtau = w . df_int/dtau + explicit energy terms``.

        Free entries hold the adjoint ``a`` solving ``K_ff a = -dJ/du_f``; for
        J1 the prescribed entries hold the prescribed displacements, which
        carry the reaction-work term.
        """
        mesh = self.mesh
        free, fixed = mesh.free_dofs, mesh.fixed_dofs
        K = sol.K.tocsr()
        if self.objective == "J1":
            dJdu = sol.f_ext[free] + K[free][:, fixed] @ mesh.fixed_values
        else:
            dJdu = (sol.f_int - sol.f_ext)[free]
        w = np.zeros(mesh.n_dofs)
        w[free] = sol.lu.solve(-dJdu)
        if self.objective == "J1":
            w[fixed] = mesh.fixed_values
        return w

    def moduli_sensitivities(self, sol):
        """dJ/d(mu~_e), dJ/d(lam~_e), dJ/d(kappa_e) at the converged state."""
        if not sol.converged:
            raise NotConverged("adjoint requested for an unconverged equilibrium")
        mesh = self.mesh
        w_e = self.adjoint_weights(sol)[mesh.elem_dofs]
        resp = sol.response
        u_e, kappa = resp.u_e, resp.kappa
        unit_mu = element_forces_and_tangent(u_e, 1.0, 0.0, kappa, mesh, tangent=False)
        unit_lam = element_forces_and_tangent(u_e, 0.0, 1.0, kappa, mesh, tangent=False)
        g_mu = np.einsum("ei,ei->e", w_e, unit_mu.f)
        g_lam = np.einsum("ei,ei->e", w_e, unit_lam.f)
        g_kappa = np.einsum("ei,ei->e", w_e, resp.df_dkappa())
        if self.objective == "J2":
            g_mu += unit_mu.energy
            g_lam += unit_lam.energy
            g_kappa += resp.denergy_dkappa()
        return g_mu, g_lam, g_kappa


def adjoint_gradient(problem, net, p):
    """``(J, dJ/dtau)`` of the problem's objective (J1 or J2, not the minimization target)."""
    ev = problem.evaluate(net, p, gradient=True)
    sign = 1.0 if problem.objective == "J1" else -1.0
    return ev.J, sign * ev.grad_target
