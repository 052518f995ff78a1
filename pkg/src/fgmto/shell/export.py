"""Artifact writers and readers: graymaps, PNG, CSV, JSON and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import json
import subprocess
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .. import __version__
from ..errors import DomainError, IoError

THETA_HEADER = ["element", "rho_M", "rho_m", "r_out", "d_r"]


@contextmanager
def _io(path, action="write"):
    try:
        yield Path(path)
    except OSError as exc:
        raise IoError(f"cannot {action} {path}: {exc.strerror or exc}") from exc


# ------------------------------------------------------------------ images

def density_to_gray(rho, nx, ny):
    """Element densities to an (ny, nx) uint8 image: 1 black, 0 white, top row first."""
    rho = np.asarray(rho, dtype=float)
    if rho.size != nx * ny:
        raise DomainError(f"{rho.size} densities do not fill a {nx}x{ny} mesh")
    gray = np.rint(255.0 * (1.0 - np.clip(rho, 0.0, 1.0))).astype(np.uint8)
    return np.flipud(gray.reshape(ny, nx))


def write_pgm(path, image):
    """ASCII graymap (P2, maxval 255), one image row per line."""
    img = np.asarray(image, dtype=np.uint8)
    if img.ndim != 2:
        raise DomainError("graymap needs a 2-D image")
    h, w = img.shape
    lines = [f"P2\n{w} {h}\n255"] + [" ".join(map(str, row)) for row in img.tolist()]
    with _io(path) as p:
        p.write_text("\n".join(lines) + "\n")
    return Path(path)


def read_pgm(path):
    with _io(path, "read") as p:
        text = p.read_text()
    tokens = [t for line in text.splitlines() for t in line.split("#", 1)[0].split()]
    if not tokens or tokens[0] != "P2":
        raise DomainError(f"{path} is not an ASCII graymap")
    w, h, maxval = map(int, tokens[1:4])
    vals = np.array(tokens[4:4 + w * h], dtype=float)
    if vals.size != w * h:
        raise DomainError(f"{path} holds {vals.size} pixels, expected {w * h}")
    return np.rint(vals * 255.0 / maxval).astype(np.uint8).reshape(h, w)


def write_png(path, image, scale=1):
    img = Image.fromarray(np.asarray(image, dtype=np.uint8))
    if scale > 1:
        img = img.resize((img.width * scale, img.height * scale), Image.NEAREST)
    with _io(path) as p:
        img.save(p, format="PNG")
    return Path(path)


def read_image(path):
    """Grayscale pixels of a P2 graymap or any image Pillow can open."""
    if Path(path).suffix.lower() == ".pgm":
        return read_pgm(path)
    with _io(path, "read") as p:
        return np.asarray(Image.open(p).convert("L"))


def draw_mesh_field(coords, elem_nodes, values, pixels_per_unit=8, margin=2):
    """Rasterize a per-element gray value (0-255) on element polygons at ``coords``.

    Background is white; ``y`` points up in the image.
    """
    lo = coords.min(axis=0) - margin
    hi = coords.max(axis=0) + margin
    w, h = np.ceil((hi - lo) * pixels_per_unit).astype(int) + 1
    img = Image.new("L", (int(w), int(h)), 255)
    draw = ImageDraw.Draw(img)
    px = (coords - lo) * pixels_per_unit
    px[:, 1] = (h - 1) - px[:, 1]
    for e in np.argsort(-np.asarray(values), kind="stable"):
        poly = [tuple(px[n]) for n in elem_nodes[e]]
        draw.polygon(poly, fill=int(values[e]))
    return np.asarray(img)


def scalar_to_gray(values, lo=None, hi=None):
    """Map a scalar field linearly onto 255 (low) .. 0 (high)."""
    v = np.asarray(values, dtype=float)
    lo = float(v.min()) if lo is None else lo
    hi = float(v.max()) if hi is None else hi
    t = np.zeros_like(v) if hi <= lo else (v - lo) / (hi - lo)
    return np.rint(255.0 * (1.0 - np.clip(t, 0.0, 1.0))).astype(np.uint8)


# ------------------------------------------------------------------ tables

def write_csv(path, header, rows):
    with _io(path) as p, open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return Path(path)


def write_theta_csv(path, theta):
    theta = np.asarray(theta, dtype=float).reshape(-1, 4)
    rows = ([e, *(repr(float(v)) for v in t)] for e, t in enumerate(theta))
    return write_csv(path, THETA_HEADER, rows)


def read_theta_csv(path):
    with _io(path, "read") as p, open(p, newline="") as fh:
        rows = list(csv.DictReader(fh))
    rows.sort(key=lambda r: int(r["element"]))
    if [int(r["element"]) for r in rows] != list(range(len(rows))):
        raise DomainError(f"{path} does not list every element exactly once")
    return np.array([[float(r[k]) for k in THETA_HEADER[1:]] for r in rows]).reshape(-1, 4)


def write_json(path, obj):
    with _io(path) as p:
        p.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return Path(path)


# ---------------------------------------------------------------- manifest

def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def version_string():
    """Package version, with ``git describe`` output appended when the source is a checkout."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
    except (OSError, subprocess.SubprocessError):
        return __version__
    desc = out.stdout.strip()
    return f"{__version__}+{desc}" if out.returncode == 0 and desc else __version__


class RunRecorder:
    """Collects the artifacts of one run and writes ``manifest.json`` next to them."""

    def __init__(self, out_dir, subcommand, config):
        self.out = Path(out_dir)
        try:
            self.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create {out_dir}: {exc.strerror or exc}") from exc
        self.subcommand = subcommand
        self.config = config
        self.artifacts = {}
        self.info = {}

    def path(self, name):
        return self.out / name

    def add(self, path):
        path = Path(path)
        self.artifacts[path.name] = sha256_file(path)
        return path

    def finish(self, status="complete", error=None):
        manifest = {
            "subcommand": self.subcommand, "version": version_string(), "status": status,
            "config": self.config, "seed": self.config.get("seed"),
            "artifacts": dict(sorted(self.artifacts.items())), **self.info,
        }
        if error is not None:
            manifest["error"] = error
        return write_json(self.out / "manifest.json", manifest)
