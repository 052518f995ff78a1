"""Subcommand implementations; each writes its artifacts through a RunRecorder."""
from __future__ import annotations

import logging

import numpy as np

from .. import LAMBDA_A, LAMBDA_B, MU_A, MU_B
from ..errors import DomainError
from ..fem.constitutive import NeoHookeanLaw, kinematics, linear_modulus, pk2_stress
from ..fem.element import gradient_at_gauss
from ..gp import DoeSpec, LameSurrogate, MaterialDataset, build_dataset, generate_doe, rrmse
from ..homog import homogenize_linear
from ..micro import BlendConfig, BinaryMicrostructure, SdfDescriptor, labels_to_gray, reconstruct
from ..micro import render_graded_assembly
from ..topopt import TRACE_COLUMNS, DesignNet, OptimizerConfig, ToProblem, bimodal_fraction
from ..topopt import optimize as run_optimizer
from ..topopt import transfer_infer
from . import export

log = logging.getLogger(__name__)

# wall-clock timing is kept out of the exported trace so reruns are byte-identical
EXPORTED_TRACE_COLUMNS = [c for c in TRACE_COLUMNS if c != "wall_time"]


def _laws():
    return NeoHookeanLaw(MU_A, LAMBDA_A), NeoHookeanLaw(MU_B, LAMBDA_B)


def _descriptor(cfg):
    return SdfDescriptor(rho_m=cfg.rho_m, r_out=cfg.r_out, d_r=cfg.d_r, n=cfg.n, seed=cfg.seed)


def _require(value, what):
    if value is None:
        raise DomainError(f"this subcommand needs --{what.replace('_', '-')}")
    return value


def _surrogate(cfg):
    if cfg.mode != "multiscale":
        return None
    return LameSurrogate.load(_require(cfg.gp_model, "gp_model"))


def write_design_images(rec, theta, nx, ny, cfg, stem="density"):
    """Density graymap and PNG, plus the assembled microstructure for multiscale designs."""
    gray = export.density_to_gray(theta[:, 0], nx, ny)
    rec.add(export.write_pgm(rec.path(f"{stem}.pgm"), gray))
    rec.add(export.write_png(rec.path(f"{stem}.png"), gray, scale=8))
    if cfg.mode == "multiscale":
        labels = render_graded_assembly(theta, nx, ny, n=cfg.tile_px, cfg=BlendConfig() if cfg.blend else None,
                                        seed=cfg.seed, void_below=cfg.void_below)
        rec.add(export.write_png(rec.path("microstructure.png"), labels_to_gray(labels)))


def write_deformed(rec, mesh, u, rho, name="deformed.png"):
    coords = mesh.node_coords + u.reshape(-1, 2)
    gray = export.scalar_to_gray(rho, 0.0, 1.0)
    rec.add(export.write_png(rec.path(name), export.draw_mesh_field(coords, mesh.elem_nodes, gray)))


# ---------------------------------------------------------- subcommands

def cmd_reconstruct(cfg, rec):
    desc = _descriptor(cfg)
    micro = reconstruct(desc)
    gray = micro.to_gray()
    rec.add(export.write_pgm(rec.path("microstructure.pgm"), gray))
    rec.add(export.write_png(rec.path("microstructure.png"), gray))
    rec.add(export.write_json(rec.path("descriptor.json"), {**desc.to_record(), "achieved_vf": micro.achieved_vf}))


def cmd_homogenize(cfg, rec):
    if cfg.image is not None:
        pixels = (export.read_image(cfg.image) < 128).astype(np.uint8)
        micro = BinaryMicrostructure(pixels)
        source = {"image": str(cfg.image)}
    else:
        desc = _descriptor(cfg)
        micro = reconstruct(desc)
        source = {"descriptor": desc.to_record()}
    tensor = homogenize_linear(micro, *_laws())
    record = {**tensor.to_record(), "volume_fraction": micro.achieved_vf, **source}
    rec.add(export.write_json(rec.path("tensor.json"), record))


def cmd_doe(cfg, rec):
    raw = generate_doe(DoeSpec(n_rho=cfg.n_rho, seed=cfg.seed, count=cfg.count))
    ds = build_dataset(raw, n=cfg.n, seed=cfg.seed, n_test=cfg.n_test)
    rec.add(ds.to_csv(rec.path("dataset.csv")))
    rec.add(rec.path("dataset.json"))


def cmd_fit_gp(cfg, rec):
    ds = MaterialDataset.from_csv(_require(cfg.dataset, "dataset"))
    sur = LameSurrogate.fit(ds, n_restarts=cfg.n_restarts, seed=cfg.seed)
    sur.save(rec.path("surrogate.json"))
    rec.add(rec.path("surrogate.json"))
    report = {"n_train": int((ds.split == "train").sum()), "n_test": int((ds.split == "test").sum())}
    for split in ("train", "test"):
        mask = ds.split == split
        if mask.any():
            mu, lam, *_ = sur.evaluate(ds.raw[mask])
            report[f"rrmse_mu_{split}"] = rrmse(mu, ds.mu[mask])
            report[f"rrmse_lambda_{split}"] = rrmse(lam, ds.lam[mask])
    rec.add(export.write_json(rec.path("rrmse.json"), report))
    return report


def cmd_optimize(cfg, rec):
    mesh = cfg.mesh()
    problem = ToProblem(mesh, objective=cfg.objective, mode=cfg.mode, rho_t=cfg.rho_t, surrogate=_surrogate(cfg))
    trace = run_optimizer(problem, DesignNet.initialize(cfg.seed), OptimizerConfig(iterations=cfg.iterations, lr=cfg.lr))
    export.write_csv(rec.path("trace.csv"), EXPORTED_TRACE_COLUMNS,
                     ([r[c] for c in EXPORTED_TRACE_COLUMNS] for r in trace.records))
    rec.add(rec.path("trace.csv"))
    trace.weights.save(rec.path("weights.json"))
    rec.add(rec.path("weights.json"))
    theta = trace.theta
    rec.add(export.write_theta_csv(rec.path("theta.csv"), theta))
    write_design_images(rec, theta, mesh.nx, mesh.ny, cfg)
    write_deformed(rec, mesh, trace.final.solution.u, theta[:, 0])
    ev = trace.final
    summary = {"status": trace.status, "iterations": len(trace.records), "objective": ev.J,
               "compliance": ev.compliance, "constraint": ev.g, "bimodal_fraction": bimodal_fraction(theta[:, 0])}
    rec.add(export.write_json(rec.path("summary.json"), summary))
    rec.info["runtime_s"] = trace.records[-1]["wall_time"] if trace.records else 0.0
    return "complete" if trace.status == "ok" else "partial"


def cmd_transfer(cfg, rec):
    net = DesignNet.load(_require(cfg.weights, "weights"))
    mesh = cfg.mesh()
    theta = transfer_infer(net, mesh)
    rec.add(export.write_theta_csv(rec.path("theta.csv"), theta))
    write_design_images(rec, theta, mesh.nx, mesh.ny, cfg)


def cmd_render(cfg, rec):
    theta = export.read_theta_csv(_require(cfg.theta, "theta"))
    if len(theta) != cfg.nx * cfg.ny:
        raise DomainError(f"theta lists {len(theta)} elements but the mesh has {cfg.nx * cfg.ny}")
    write_design_images(rec, theta, cfg.nx, cfg.ny, cfg)


def element_fields(mesh, sol, mu, lam):
    """Per-element Gauss-averaged Green strain and PK2 stress magnitudes.

    The stress is the one conjugate to the interpolated energy: the
    Neo-Hookean stress at the scaled state weighted by kappa, plus the
    small-strain stress weighted by ``1 - kappa**2``.
    """
    kappa = sol.response.kappa
    dN_dX, _ = mesh.geometry()
    H = gradient_at_gauss(sol.u[mesh.elem_dofs], dN_dX)  # (E, G, 2, 2)
    E = 0.5 * (H + np.swapaxes(H, -1, -2) + np.swapaxes(H, -1, -2) @ H)
    k = kappa[:, None, None, None]
    kin = kinematics(np.eye(2) + k * H)
    S_n = pk2_stress(kin, mu=mu[:, None], lam=lam[:, None])
    eps = 0.5 * (H + np.swapaxes(H, -1, -2))
    D = linear_modulus(mu, lam)
    v = np.stack([eps[..., 0, 0], eps[..., 1, 1], 2.0 * eps[..., 0, 1]], axis=-1)
    s = np.einsum("eij,egj->egi", D, v)
    S_l = np.stack([np.stack([s[..., 0], s[..., 2]], -1), np.stack([s[..., 2], s[..., 1]], -1)], -2)
    S = k * S_n + (1.0 - k**2) * S_l
    norm = lambda T: np.sqrt(np.einsum("egij,egij->eg", T, T)).mean(axis=1)  # noqa: E731
    return norm(E), norm(S)


def cmd_fields(cfg, rec):
    theta = export.read_theta_csv(_require(cfg.theta, "theta"))
    mesh = cfg.mesh()
    if len(theta) != mesh.n_elems:
        raise DomainError(f"theta lists {len(theta)} elements but the mesh has {mesh.n_elems}")
    problem = ToProblem(mesh, objective=cfg.objective, mode=cfg.mode, rho_t=cfg.rho_t, surrogate=_surrogate(cfg))
    ev = problem.evaluate_theta(theta, p=3.0, gradient=False)
    sol = ev.solution
    strain, stress = element_fields(mesh, sol, *ev.moduli)
    undeformed = mesh.node_coords
    deformed = undeformed + sol.u.reshape(-1, 2)
    images = {
        "kappa.png": (undeformed, export.scalar_to_gray(ev.kappa, 0.0, 1.0)),
        "green_strain.png": (deformed, export.scalar_to_gray(strain)),
        "pk2_stress.png": (deformed, export.scalar_to_gray(stress)),
    }
    for name, (coords, gray) in images.items():
        rec.add(export.write_png(rec.path(name), export.draw_mesh_field(coords, mesh.elem_nodes, gray)))
    rows = ([e, repr(float(ev.kappa[e])), repr(float(strain[e])), repr(float(stress[e]))] for e in range(mesh.n_elems))
    rec.add(export.write_csv(rec.path("fields.csv"), ["element", "kappa", "green_strain", "pk2_stress"], rows))


COMMANDS = {
    "reconstruct": cmd_reconstruct,
    "homogenize": cmd_homogenize,
    "doe": cmd_doe,
    "fit-gp": cmd_fit_gp,
    "optimize": cmd_optimize,
    "transfer": cmd_transfer,
    "render": cmd_render,
    "fields": cmd_fields,
}
