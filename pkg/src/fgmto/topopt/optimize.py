"""Outer optimization loop: Adam on a quadratic-penalty merit with density-penalty continuation."""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import FgmtoError
from .net import DesignNet

log = logging.getLogger(__name__)

TRACE_COLUMNS = ["iteration", "objective", "compliance", "constraint", "p", "c_pen", "merit",
                 "lr", "retries", "status", "wall_time"]


@dataclass
class OptimizerConfig:
    iterations: int = 300
    lr: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    c_pen0: float = 10.0
    c_pen_growth: float = 1.5
    c_pen_every: int = 25
    p_start: float = 1.0
    p_end: float = 3.0
    continuation_fraction: float = 0.5
    stagnation_tol: float = 1e-5
    patience: int = 25
    g_tol: float = 0.02
    max_retries: int = 6
    lr_final: float | None = 1e-3

    def p_at(self, k):
        """Penalty exponent at iteration k: linear ramp over the first part of the budget."""
        ramp = max(1.0, self.continuation_fraction * self.iterations)
        return self.p_start + (self.p_end - self.p_start) * min(1.0, k / ramp)

    def lr_at(self, k):
        """Constant rate during the p ramp, then geometric decay to ``lr_final`` at the budget end."""
        if self.lr_final is None:
            return self.lr
        k0 = self.continuation_fraction * self.iterations
        frac = min(1.0, max(0.0, k - k0) / max(1.0, self.iterations - 1 - k0))
        return self.lr * (self.lr_final / self.lr) ** frac

    def c_pen_at(self, k):
        return self.c_pen0 * self.c_pen_growth ** (k // self.c_pen_every)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n), 0)

    def step(self, tau, grad, lr, cfg):
        """Return the updated parameters and the new state; ``self`` is left untouched."""
        t = self.t + 1
        m = cfg.beta1 * self.m + (1 - cfg.beta1) * grad
        v = cfg.beta2 * self.v + (1 - cfg.beta2) * grad**2
        mh = m / (1 - cfg.beta1**t)
        vh = v / (1 - cfg.beta2**t)
        return tau - lr * mh / (np.sqrt(vh) + cfg.eps), AdamState(m, v, t)


@dataclass
class OptimizationTrace:
    records: list = field(default_factory=list)
    theta: np.ndarray | None = None
    weights: DesignNet | None = None
    final: object = None
    status: str = "ok"

    def column(self, name):
        return np.array([r[name] for r in self.records])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS)
            w.writeheader()
            for r in self.records:
                w.writerow({k: r[k] for k in TRACE_COLUMNS})
        return path


def merit(ev, J_ref, c_pen):
    viol = max(0.0, ev.g)
    value = ev.target / J_ref + c_pen * viol**2
    grad = ev.grad_target / J_ref + 2.0 * c_pen * viol * ev.grad_g
    return value, grad


def optimize(problem, net=None, cfg=None, seed=0, callback=None):
    """Minimize the problem's target under the volume constraint.

    A failed equilibrium solve rejects the trial weights; the step is retried
    from the last accepted weights with half the learning rate, up to
    ``cfg.max_retries`` times.
    """
    cfg = cfg or OptimizerConfig()
    net = net or DesignNet.initialize(seed)
    tau = net.params
    adam = AdamState.zeros(tau.size)
    trace = OptimizationTrace()
    t0 = time.perf_counter()

    p = cfg.p_at(0)
    ev = problem.evaluate(net, p)
    J_ref = abs(ev.target) or 1.0
    prev_merit, flat = None, 0
    retries = 0
    for k in range(cfg.iterations):
        c_pen = cfg.c_pen_at(k)
        L, grad = merit(ev, J_ref, c_pen)
        trace.records.append({
            "iteration": k, "objective": ev.J, "compliance": ev.compliance, "constraint": ev.g,
            "p": ev.p, "c_pen": c_pen, "merit": L, "lr": cfg.lr_at(k) * 0.5**retries, "retries": retries,
            "status": "converged", "wall_time": time.perf_counter() - t0})
        if callback is not None:
            callback(k, ev)
        frozen = k >= cfg.continuation_fraction * cfg.iterations
        if prev_merit is not None and frozen and abs(L - prev_merit) <= cfg.stagnation_tol * abs(L):
            flat += 1
        else:
            flat = 0
        prev_merit = L
        if flat >= cfg.patience and abs(ev.g) <= cfg.g_tol:
            break
        if k == cfg.iterations - 1:
            break
        p_next = cfg.p_at(k + 1)
        for retries in range(cfg.max_retries + 1):
            tau_try, adam_try = adam.step(tau, grad, cfg.lr_at(k) * 0.5**retries, cfg)
            try:
                ev_try = problem.evaluate(net.with_params(tau_try), p_next)
            except FgmtoError as exc:
                log.info("iteration %d: evaluation failed (%s); halving the step", k + 1, exc)
                continue
            tau, adam, ev = tau_try, adam_try, ev_try
            break
        else:
            trace.status = "failed"
            log.warning("iteration %d: no admissible step after %d retries", k + 1, cfg.max_retries)
            break
    net = net.with_params(tau)
    trace.weights = net
    trace.theta = ev.theta
    trace.final = ev
    return trace


def transfer_infer(net, mesh):
    """Design field of a trained network on another mesh of the same domain."""
    return net.forward(mesh.normalized_centroids())


def block_average(field, nx, ny, factor):
    """Average an element field of an (nx, ny) mesh over factor-by-factor blocks."""
    a = np.asarray(field, dtype=float).reshape(ny, nx)
    return a.reshape(ny // factor, factor, nx // factor, factor).mean(axis=(1, 3)).ravel()


def bimodal_fraction(rho, lo=0.1, hi=0.9):
    rho = np.asarray(rho)
    return float(np.mean((rho <= lo) | (rho >= hi)))
