"""Pair of GP models mapping raw microstructure descriptors to effective Lamé parameters."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .doe import INPUT_HI, INPUT_LO
from .model import GpModel, fit_gp


@dataclass
class LameSurrogate:
    mu: GpModel
    lam: GpModel
    lo: np.ndarray = INPUT_LO
    hi: np.ndarray = INPUT_HI

    def normalize(self, raw):
        return (np.asarray(raw, dtype=float) - self.lo) / (self.hi - self.lo)

    def evaluate(self, raw):
        """``(mu, lam, dmu/draw, dlam/draw)`` for raw rows ``(rho_m, R_out, dR)``."""
        s = self.normalize(raw)
        inv = 1.0 / (np.asarray(self.hi, dtype=float) - self.lo)
        return (self.mu.predict(s), self.lam.predict(s),
                self.mu.predict_gradient(s) * inv, self.lam.predict_gradient(s) * inv)

    def save(self, path):
        Path(path).write_text(json.dumps({"lo": list(map(float, self.lo)), "hi": list(map(float, self.hi)),
                                          "mu": self.mu.to_dict(), "lam": self.lam.to_dict()}))

    @classmethod
    def load(cls, path):
        d = json.loads(Path(path).read_text())
        return cls(GpModel.from_dict(d["mu"]), GpModel.from_dict(d["lam"]),
                   np.array(d["lo"]), np.array(d["hi"]))

    @classmethod
    def fit(cls, dataset, **kw):
        S, mu, lam = dataset.subset("train")
        return cls(fit_gp(S, mu, **kw), fit_gp(S, lam, **kw), np.asarray(dataset.lo), np.asarray(dataset.hi))
