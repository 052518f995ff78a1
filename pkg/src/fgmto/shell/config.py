"""Experiment configuration: JSON file, flag overrides and preset defaults."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..errors import DomainError, IoError
from .presets import PRESETS, build_mesh, preset_defaults

OUT_ENV = "FGMTO_OUT"
PRESET_KEYS = ("nx", "ny", "supports", "load_at", "load_kind", "magnitude", "objective")

# resolution and dataset sizes used when paper_scale is set
PAPER_SCALE = {"n": 500, "count": 1202, "n_test": 201}


@dataclass
class ExperimentConfig:
    """Every knob a subcommand may read; unset preset keys come from the preset."""

    preset: str = "cantilever"
    nx: int | None = None
    ny: int | None = None
    supports: list | None = None
    load_at: str | None = None
    load_kind: str | None = None
    magnitude: float | None = None
    objective: str | None = None
    mode: str = "single_scale"
    rho_t: float = 0.3
    seed: int = 0
    iterations: int = 300
    lr: float = 1e-2
    out: str | None = None
    gp_model: str | None = None
    # microstructure descriptor and reconstruction resolution
    rho_m: float = 0.5
    r_out: float = 20.0
    d_r: float = 5.0
    n: int = 64
    image: str | None = None
    # design of experiments and surrogate fitting
    n_rho: int = 4
    count: int | None = 250
    n_test: int = 50
    dataset: str | None = None
    n_restarts: int = 5
    # rendering and transfer
    theta: str | None = None
    weights: str | None = None
    tile_px: int = 64
    void_below: float = 0.5
    blend: bool = True
    paper_scale: bool = False

    @classmethod
    def keys(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, d):
        unknown = sorted(set(d) - set(cls.keys()))
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path=None, overrides=None):
        """Config file (optional) with ``overrides`` applied on top, then resolved."""
        d = {}
        if path is not None:
            try:
                d = json.loads(Path(path).read_text())
            except OSError as exc:
                raise IoError(f"cannot read config {path}: {exc.strerror or exc}") from exc
            except json.JSONDecodeError as exc:
                raise DomainError(f"config {path} is not valid JSON: {exc}") from exc
            if not isinstance(d, dict):
                raise DomainError("config file must hold a JSON object")
        d.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(d).resolved()

    def resolved(self):
        """Copy with preset defaults filled in and paper-scale sizes applied."""
        d = asdict(self)
        if self.preset != "custom":
            for k, v in preset_defaults(self.preset).items():
                if d[k] is None:
                    d[k] = v
        missing = [k for k in PRESET_KEYS if d[k] is None]
        if missing:
            raise DomainError(f"custom preset needs {', '.join(missing)}")
        if self.paper_scale:
            d.update(PAPER_SCALE)
        return ExperimentConfig(**d)

    def to_dict(self):
        return asdict(self)

    def mesh(self):
        return build_mesh(self.nx, self.ny, self.supports, self.load_at, self.load_kind, self.magnitude)

    def out_dir(self, subcommand):
        if self.out:
            return Path(self.out)
        return Path(os.environ.get(OUT_ENV, "fgmto-runs")) / subcommand


def preset_names():
    return [*PRESETS, "custom"]
