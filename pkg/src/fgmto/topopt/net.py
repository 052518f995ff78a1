"""Shallow coordinate network mapping element centroids to design parameters."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from ..gp.doe import DR_RANGE, R_OUT_RANGE, RHO_RANGE

# physical ranges of (rho_M, rho_m, R_out, dR)
THETA_LO = np.array([0.0, RHO_RANGE[0], R_OUT_RANGE[0], DR_RANGE[0]], dtype=float)
THETA_HI = np.array([1.0, RHO_RANGE[1], R_OUT_RANGE[1], DR_RANGE[1]], dtype=float)


# constant gain on the normalized centroids so first-layer updates move unit boundaries at a useful rate
INPUT_SCALE = 20.0


@dataclass
class DesignNet:
    """2-H-4 network: tanh hidden layer, sigmoid outputs mapped into ``[THETA_LO, THETA_HI]``.

    Inputs are centroids normalized to [0, 1]^2, multiplied by the constant
    ``input_scale`` before the first layer.
    """

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    input_scale: float = 1.0

    @classmethod
    def initialize(cls, seed=0, hidden=20, input_scale=INPUT_SCALE, bias_spread=1.0):
        """Glorot-uniform weights, zero output biases and spread hidden biases.

        Hidden biases are uniform in ``+-bias_spread * a1 * input_scale`` so that
        the hidden units' zero lines cross the domain instead of all passing
        through the origin corner.
        """
        rng = np.random.default_rng(seed)
        a1 = np.sqrt(6.0 / (2 + hidden))
        a2 = np.sqrt(6.0 / (hidden + 4))
        W1 = rng.uniform(-a1, a1, (hidden, 2))
        W2 = rng.uniform(-a2, a2, (4, hidden))
        spread = bias_spread * a1 * input_scale
        b1 = rng.uniform(-spread, spread, hidden)
        return cls(W1=W1, b1=b1, W2=W2, b2=np.zeros(4), input_scale=float(input_scale))

    @classmethod
    def zeros(cls, hidden=20):
        return cls(np.zeros((hidden, 2)), np.zeros(hidden), np.zeros((4, hidden)), np.zeros(4))

    @property
    def hidden(self):
        return len(self.b1)

    @property
    def params(self):
        return np.concatenate([self.W1.ravel(), self.b1, self.W2.ravel(), self.b2])

    def with_params(self, tau):
        tau = np.asarray(tau, dtype=float)
        h = self.hidden
        i = 0
        parts = []
        for shape in ((h, 2), (h,), (4, h), (4,)):
            size = int(np.prod(shape))
            parts.append(tau[i:i + size].reshape(shape))
            i += size
        return DesignNet(*parts, input_scale=self.input_scale)

    def _hidden(self, X):
        return np.tanh(self.input_scale * np.asarray(X, dtype=float) @ self.W1.T + self.b1)

    def forward(self, X):
        """Per-row design parameters ``(rho_M, rho_m, R_out, dR)`` for inputs X (E, 2)."""
        sig = expit(self._hidden(X) @ self.W2.T + self.b2)
        return THETA_LO + (THETA_HI - THETA_LO) * sig

    def vjp(self, X, g_theta):
        """Gradient with respect to the flat parameters of ``sum(g_theta * forward(X))``."""
        X = np.asarray(X, dtype=float)
        H = self._hidden(X)
        sig = expit(H @ self.W2.T + self.b2)
        gz = g_theta * (THETA_HI - THETA_LO) * sig * (1.0 - sig)  # (E, 4)
        gW2 = gz.T @ H
        gb2 = gz.sum(axis=0)
        ga = (gz @ self.W2) * (1.0 - H**2)  # (E, hidden)
        gW1 = ga.T @ (self.input_scale * X)
        gb1 = ga.sum(axis=0)
        return np.concatenate([gW1.ravel(), gb1, gW2.ravel(), gb2])

    def to_dict(self):
        return {"W1": self.W1.tolist(), "b1": self.b1.tolist(), "W2": self.W2.tolist(), "b2": self.b2.tolist(),
                "input_scale": self.input_scale}

    @classmethod
    def from_dict(cls, d):
        return cls(*(np.array(d[k], dtype=float) for k in ("W1", "b1", "W2", "b2")),
                   input_scale=float(d.get("input_scale", 1.0)))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


def net_forward(net, centroids):
    return net.forward(centroids)
