"""Material dataset: reconstructed microstructures and their homogenized Lamé parameters."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import LAMBDA_A, LAMBDA_B, MU_A, MU_B
from ..errors import FgmtoError
from ..fem.constitutive import NeoHookeanLaw
from ..homog import extract_lame, homogenize_linear
from ..micro import SdfDescriptor, derive_seed, levelset_cut, reconstruct_phase_field
from .doe import INPUT_HI, INPUT_LO, normalize_inputs

log = logging.getLogger(__name__)

CSV_COLUMNS = ["rho_m", "r_out", "d_r", "s1", "s2", "s3", "mu_m", "lambda_m", "split"]


@dataclass
class MaterialDataset:
    raw: np.ndarray
    mu: np.ndarray
    lam: np.ndarray
    split: np.ndarray
    lo: np.ndarray = field(default_factory=lambda: INPUT_LO.copy())
    hi: np.ndarray = field(default_factory=lambda: INPUT_HI.copy())
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.raw = np.asarray(self.raw, dtype=float).reshape(-1, 3)
        self.mu = np.asarray(self.mu, dtype=float)
        self.lam = np.asarray(self.lam, dtype=float)
        self.split = np.asarray(self.split, dtype="<U5")

    def __len__(self):
        return len(self.raw)

    @property
    def s(self):
        return normalize_inputs(self.raw, self.lo, self.hi)

    def subset(self, name):
        """``(s, mu, lam)`` of the ``'train'`` or ``'test'`` rows."""
        m = self.split == name
        return self.s[m], self.mu[m], self.lam[m]

    def to_csv(self, path):
        """Write the table and a ``.json`` sidecar with the normalization constants."""
        path = Path(path)
        s = self.s
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for k in range(len(self)):
                w.writerow([*(repr(float(v)) for v in self.raw[k]), *(repr(float(v)) for v in s[k]),
                            repr(float(self.mu[k])), repr(float(self.lam[k])), self.split[k]])
        sidecar = {"lo": self.lo.tolist(), "hi": self.hi.tolist(), "columns": CSV_COLUMNS, **self.meta}
        path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2))
        return path

    @classmethod
    def from_csv(cls, path):
        path = Path(path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        side = path.with_suffix(".json")
        meta = json.loads(side.read_text()) if side.exists() else {}
        lo = np.array(meta.pop("lo", INPUT_LO))
        hi = np.array(meta.pop("hi", INPUT_HI))
        meta.pop("columns", None)
        raw = np.array([[float(r["rho_m"]), float(r["r_out"]), float(r["d_r"])] for r in rows]).reshape(-1, 3)
        return cls(raw=raw, mu=[float(r["mu_m"]) for r in rows], lam=[float(r["lambda_m"]) for r in rows],
                   split=[r["split"] for r in rows], lo=lo, hi=hi, meta=meta)


def deduplicate(raw):
    """Unique rows in first-seen order; logs a warning when any are dropped."""
    raw = np.asarray(raw, dtype=float).reshape(-1, 3)
    _, first = np.unique(raw, axis=0, return_index=True)
    keep = np.sort(first)
    if len(keep) < len(raw):
        log.warning("dropped %d duplicate design rows", len(raw) - len(keep))
    return raw[keep]


def evaluate_row(raw_row, n, seed, law_a, law_b):
    desc = SdfDescriptor(rho_m=float(raw_row[0]), r_out=float(raw_row[1]), d_r=float(raw_row[2]),
                         n=n, seed=seed)
    micro = levelset_cut(reconstruct_phase_field(desc), desc.rho_m)
    return extract_lame(homogenize_linear(micro, law_a, law_b))


def build_dataset(raw, n=64, seed=0, n_test=0, law_a=None, law_b=None, progress=None):
    """Reconstruct, homogenize and project every design row.

    Row ``k`` (after de-duplication) is reconstructed with the seed derived
    from ``(seed, k)``. The last ``n_test`` rows of a seeded permutation form
    the test split.
    """
    law_a = law_a or NeoHookeanLaw(MU_A, LAMBDA_A)
    law_b = law_b or NeoHookeanLaw(MU_B, LAMBDA_B)
    raw = deduplicate(raw)
    mu = np.empty(len(raw))
    lam = np.empty(len(raw))
    for k, row in enumerate(raw):
        try:
            lame = evaluate_row(row, n, derive_seed(seed, k), law_a, law_b)
        except FgmtoError as exc:
            raise type(exc)(f"dataset row {k} {row.tolist()}: {exc}") from exc
        mu[k], lam[k] = lame.mu_m, lame.lambda_m
        if progress is not None:
            progress(k, len(raw))
    split = np.full(len(raw), "train", dtype="<U5")
    if n_test:
        perm = np.random.default_rng(seed).permutation(len(raw))
        split[perm[len(raw) - n_test:]] = "test"
    meta = {"n": int(n), "seed": int(seed), "law_a": [law_a.mu0, law_a.lambda0],
            "law_b": [law_b.mu0, law_b.lambda0]}
    return MaterialDataset(raw=raw, mu=mu, lam=lam, split=split, meta=meta)
