"""Adaptive pseudo-time Newton-Raphson driver for the interpolated hyperelastic problem."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, InvertedElement, SingularTangent, StepUnderflow
from .assembly import Assembler, factorize
from .element import element_forces_and_tangent

log = logging.getLogger(__name__)


@dataclass
class NewtonConfig:
    t0: float = 0.0
    tf: float = 1.0
    dt0: float = 0.01
    dt_max: float = 0.05
    dt_min: float = 1e-6
    delta0: float = 0.1
    delta_f: float = 0.001
    grow: float = 1.5
    shrink: float = 0.25
    max_inner_iters: int = 30

    def __post_init__(self):
        if not (0.0 < self.dt_min <= self.dt0 <= self.dt_max <= self.tf - self.t0):
            raise DomainError("need 0 < dt_min <= dt0 <= dt_max <= tf - t0")
        if not self.delta_f <= self.delta0:
            raise DomainError("need delta_f <= delta0")

    def tolerance(self, t):
        """Tolerance interpolated linearly from delta0 at t0 to delta_f at tf."""
        s = (t - self.t0) / (self.tf - self.t0)
        return s * self.delta_f + (1.0 - s) * self.delta0


@dataclass
class StepRecord:
    t: float
    dt: float
    iterations: int
    accepted: bool
    reason: str = ""


@dataclass
class EquilibriumSolution:
    """Converged state at ``t = tf``.

    ``K`` is the full tangent at the converged state and ``lu`` a factorization
    of its free-free block, reused by adjoint solves.
    """

    u: np.ndarray
    K: object
    lu: object
    f_int: np.ndarray
    f_ext: np.ndarray
    residual_norm: float
    history: list = field(default_factory=list)
    response: object = None
    converged: bool = True

    @property
    def n_steps(self):
        return sum(1 for h in self.history if h.accepted)


class _StepFailed(Exception):
    def __init__(self, reason, iterations):
        super().__init__(reason)
        self.iterations = iterations


class NewtonSolver:
    """Equilibrium of ``f_int(u) = t f_ext`` with ``u_D = t u_D_bar`` marched over pseudo-time.

    Element moduli ``mu``/``lam`` (already penalized) and ``kappa`` are fixed for
    the whole solve.
    """

    def __init__(self, mesh, mu, lam, kappa, cfg=None, assembler=None):
        self.mesh = mesh
        self.mu = np.asarray(mu, dtype=float)
        self.lam = np.asarray(lam, dtype=float)
        self.kappa = np.broadcast_to(np.asarray(kappa, dtype=float), (mesh.n_elems,))
        self.cfg = cfg or NewtonConfig()
        self.asm = assembler or Assembler(mesh)
        self.f_ext_full = mesh.external_force()

    # ------------------------------------------------------------ primitives
    def evaluate(self, u, tangent=True):
        resp = element_forces_and_tangent(self.asm.gather(u), self.mu, self.lam, self.kappa,
                                          self.mesh, tangent=tangent)
        f_int = self.asm.vector(resp.f)
        K = self.asm.matrix(resp.K) if tangent else None
        return f_int, K, resp

    def _criteria(self, r_free, f_int, f_ext, du, u, delta):
        force_ok = np.linalg.norm(r_free) <= delta * max(np.linalg.norm(f_ext), np.linalg.norm(f_int))
        disp_ok = np.linalg.norm(du) <= delta * np.linalg.norm(u)
        return force_ok and disp_ok

    # ------------------------------------------------------------------ step
    def _step(self, u_start, state, t_new, delta, first_solve):
        """Newton iterations for one pseudo-time step.

        ``state`` is the cached ``(f_int, K, response)`` at ``u_start``. Returns the
        converged displacement, its cached state and the iteration count.
        """
        asm, cfg = self.asm, self.cfg
        free, fixed = asm.free, asm.fixed
        f_ext = t_new * self.f_ext_full
        u = u_start.copy()
        f_int, K, _ = state
        du_fixed = t_new * self.mesh.fixed_values - u[fixed]
        for it in range(1, cfg.max_inner_iters + 1):
            K_ff, K_fd = asm.partition(K)
            rhs = (f_ext - f_int)[free]
            if it == 1 and fixed.size:
                rhs = rhs - K_fd @ du_fixed
            try:
                lu = factorize(K_ff)
            except SingularTangent:
                if first_solve and it == 1:
                    raise
                raise _StepFailed("singular tangent", it) from None
            du = np.zeros_like(u)
            du[free] = lu.solve(rhs)
            if it == 1 and fixed.size:
                du[fixed] = du_fixed
            u = u + du
            if not np.all(np.isfinite(u)):
                raise _StepFailed("non-finite displacement", it)
            try:
                f_int, K, resp = self.evaluate(u)
            except InvertedElement as exc:
                raise _StepFailed(f"inverted element: {exc}", it) from None
            r_new = (f_ext - f_int)[free]
            # size of the next correction, estimated with the previous factorization
            du_next = lu.solve(r_new)
            if self._criteria(r_new, f_int, f_ext, du_next, u, delta):
                return u, (f_int, K, resp), it
        raise _StepFailed("max_inner_iters exceeded", cfg.max_inner_iters)

    # ----------------------------------------------------------------- solve
    def solve(self, linear=False):
        """March pseudo-time from t0 to tf; ``linear=True`` takes one full step.

        Raises StepUnderflow when the step would drop below ``dt_min`` and
        SingularTangent when the undeformed tangent cannot be factorized.
        """
        cfg = self.cfg
        u = np.zeros(self.mesh.n_dofs)
        t = cfg.t0
        dt = (cfg.tf - cfg.t0) if linear else cfg.dt0
        dt_max = (cfg.tf - cfg.t0) if linear else cfg.dt_max
        history = []
        first = True
        state = self.evaluate(u)
        while t < cfg.tf - 1e-14 * (cfg.tf - cfg.t0):
            dt = min(dt_max, dt, cfg.tf - t)
            t_new = cfg.tf if np.isclose(t + dt, cfg.tf, rtol=0, atol=1e-12) else t + dt
            delta = cfg.tolerance(t_new)
            try:
                u_new, state_new, its = self._step(u, state, t_new, delta, first)
            except _StepFailed as exc:
                history.append(StepRecord(t_new, dt, exc.iterations, False, str(exc)))
                dt *= cfg.shrink
                if dt < cfg.dt_min:
                    raise StepUnderflow(f"dt={dt:.3e} < dt_min at t={t:.6f}", history) from None
                log.debug("step to t=%.5f rejected (%s); dt -> %.3e", t_new, exc, dt)
                continue
            first = False
            history.append(StepRecord(t_new, dt, its, True))
            u, state, t = u_new, state_new, t_new
            dt *= cfg.grow
        return self._finish(u, state, history)

    def _finish(self, u, state, history):
        f_int, K, resp = state
        f_ext = self.f_ext_full * self.cfg.tf
        K_ff, _ = self.asm.partition(K)
        lu = factorize(K_ff)
        r = (f_ext - f_int)[self.asm.free]
        return EquilibriumSolution(u=u, K=K, lu=lu, f_int=f_int, f_ext=f_ext,
                                   residual_norm=float(np.linalg.norm(r)),
                                   history=history, response=resp)


def newton_solve(mesh, mu, lam, kappa, cfg=None, linear=False):
    """Solve the interpolated hyperelastic equilibrium on ``mesh``; see NewtonSolver."""
    return NewtonSolver(mesh, mu, lam, kappa, cfg).solve(linear=linear)
