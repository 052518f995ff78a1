"""Ordinary-kriging Gaussian process with a Gaussian kernel and profiled likelihood."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize
from scipy.stats import qmc

from ..errors import DomainError, IllConditioned

LN10 = np.log(10.0)
NUGGET = 1e-6
NUGGET_CAP = 1e-3
W_BOUNDS = (-6.0, 6.0)
SIGMA2_FLOOR = 1e-300


def correlation(S1, S2, w):
    """``exp(-sum_k 10**w_k (s_k - s'_k)**2)`` between two point sets."""
    theta = 10.0 ** np.asarray(w, dtype=float)
    d2 = (S1[:, None, :] - S2[None, :, :]) ** 2
    return np.exp(-d2 @ theta)


def _factor(R, nugget):
    """Cholesky of ``R + nugget I``, escalating the nugget tenfold up to the cap."""
    n = len(R)
    while nugget <= NUGGET_CAP * (1 + 1e-9):
        try:
            return cho_factor(R + nugget * np.eye(n), lower=True), nugget
        except np.linalg.LinAlgError:
            nugget *= 10.0
    raise IllConditioned("correlation matrix is not positive definite at any nugget up to the cap")


def _profile(S, y, w, nugget):
    """Profiled quantities for log-roughness ``w``: ``(loglik, grad, beta, sigma2, alpha, cf, nugget)``."""
    n, d = S.shape
    R = correlation(S, S, w)
    cf, nugget = _factor(R, nugget)
    ones = np.ones(n)
    Ri1 = cho_solve(cf, ones)
    Riy = cho_solve(cf, y)
    beta = (ones @ Riy) / (ones @ Ri1)
    resid = y - beta
    alpha = cho_solve(cf, resid)
    sigma2 = max(resid @ alpha / n, SIGMA2_FLOOR)
    logdet = 2.0 * np.sum(np.log(np.diag(cf[0])))
    loglik = -0.5 * n * np.log(sigma2) - 0.5 * logdet
    Rinv = cho_solve(cf, np.eye(n))
    grad = np.empty(d)
    A = np.outer(alpha, alpha) / sigma2 - Rinv
    theta = 10.0 ** w
    for k in range(d):
        dR = -R * LN10 * theta[k] * (S[:, None, k] - S[None, :, k]) ** 2
        grad[k] = 0.5 * np.sum(A * dR)
    return loglik, grad, beta, sigma2, alpha, cf, nugget


@dataclass
class GpModel:
    """Fitted single-output GP on inputs in [0, 1]^d.

    Outputs are standardized internally by ``y_mean`` and ``y_scale``;
    ``beta`` and ``sigma2`` are reported in original units.
    """

    S: np.ndarray
    q: np.ndarray
    w: np.ndarray
    nugget: float = NUGGET
    y_mean: float = 0.0
    y_scale: float = 1.0
    loglik: float = float("nan")
    restart_logliks: list = field(default_factory=list)

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        y = (self.q - self.y_mean) / self.y_scale
        _, _, self._beta, self._sigma2, self._alpha, self._cf, self.nugget = _profile(
            self.S, y, self.w, self.nugget)

    @property
    def beta_hat(self):
        return self.y_mean + self.y_scale * self._beta

    @property
    def sigma2_hat(self):
        s2 = self._sigma2 if self._sigma2 > SIGMA2_FLOOR else 0.0
        return self.y_scale**2 * s2

    def _check_range(self, s):
        if np.any(s < -1e-9) or np.any(s > 1 + 1e-9):
            warnings.warn("GP evaluated outside the normalized training box [0, 1]^d", stacklevel=3)

    def predict(self, s):
        """Posterior mean at points ``s`` (m, d) or a single point (d,)."""
        s = np.asarray(s, dtype=float)
        single = s.ndim == 1
        s = np.atleast_2d(s)
        self._check_range(s)
        r = correlation(s, self.S, self.w)
        out = self.y_mean + self.y_scale * (self._beta + r @ self._alpha)
        return out[0] if single else out

    def predict_gradient(self, s):
        """d(mean)/ds at ``s``, shape (m, d) or (d,)."""
        s = np.asarray(s, dtype=float)
        single = s.ndim == 1
        s = np.atleast_2d(s)
        self._check_range(s)
        r = correlation(s, self.S, self.w)
        theta = 10.0 ** self.w
        diff = s[:, None, :] - self.S[None, :, :]
        g = -2.0 * theta * np.einsum("mi,mik,i->mk", r, diff, self._alpha)
        g = self.y_scale * g
        return g[0] if single else g

    def to_dict(self):
        return {"w": self.w.tolist(), "nugget": self.nugget, "y_mean": self.y_mean,
                "y_scale": self.y_scale, "loglik": self.loglik, "beta_hat": self.beta_hat,
                "sigma2_hat": self.sigma2_hat, "S": self.S.tolist(), "q": self.q.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(S=np.array(d["S"]), q=np.array(d["q"]), w=np.array(d["w"]), nugget=d["nugget"],
                   y_mean=d["y_mean"], y_scale=d["y_scale"], loglik=d.get("loglik", float("nan")))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_gp(S, q, nugget=NUGGET, n_restarts=8, seed=0, bounds=W_BOUNDS):
    """Maximum profiled-likelihood fit of the log10 roughness ``w``.

    Local L-BFGS-B ascents start from a scrambled Sobol design over the
    bounds; the best restart is kept. ``restart_logliks`` on the result lists
    the likelihood reached by each restart in order.
    """
    S = np.asarray(S, dtype=float)
    q = np.asarray(q, dtype=float)
    if S.ndim != 2 or len(S) != len(q):
        raise DomainError("S must be (n, d) with one output per row")
    if len(np.unique(S, axis=0)) < 2:
        raise DomainError("need at least two distinct training rows")
    y_mean = float(q.mean())
    y_scale = float(q.std()) or 1.0
    y = (q - y_mean) / y_scale
    d = S.shape[1]

    def negll(w):
        try:
            ll, g, *_ = _profile(S, y, w, nugget)
        except IllConditioned:
            return 1e300, np.zeros(d)
        return -ll, -g

    n_starts = max(n_restarts, 1)
    starts = qmc.Sobol(d=d, scramble=True, seed=seed).random_base2(int(np.ceil(np.log2(n_starts))))[:n_starts]
    starts = bounds[0] + (bounds[1] - bounds[0]) * starts
    best_w, best_ll, lls = None, -np.inf, []
    for w0 in starts:
        res = minimize(negll, w0, jac=True, method="L-BFGS-B", bounds=[bounds] * d)
        ll = -float(res.fun)
        lls.append(ll)
        if ll > best_ll:
            best_ll, best_w = ll, np.array(res.x)
    if best_w is None or not np.isfinite(best_ll) or best_ll <= -1e299:
        raise IllConditioned("no restart produced a factorizable correlation matrix")
    return GpModel(S=S, q=q, w=best_w, nugget=nugget, y_mean=y_mean, y_scale=y_scale,
                   loglik=best_ll, restart_logliks=lls)


def rrmse(predictions, truths):
    """Root-mean-square error relative to the root-mean-square of the truths."""
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(truths, dtype=float)
    if p.shape != t.shape:
        raise DomainError("predictions and truths differ in length")
    scale = np.sqrt(np.mean(t**2)) if t.size else 0.0
    if scale == 0:
        raise DomainError("truths have zero RMS")
    return float(np.sqrt(np.mean((p - t) ** 2)) / scale)
