"""Shared desk-scale fixtures and the acceptance report printed after the run."""
import os

import pytest

from fgmto.gp import DoeSpec, LameSurrogate, build_dataset, generate_doe
from fgmto.shell.presets import build_mesh
from fgmto.topopt import DesignNet, OptimizerConfig, ToProblem, optimize

PAPER_SCALE = os.environ.get("FGMTO_PAPER_SCALE") == "1"

# criterion id -> list of (check name, passed, detail)
ACCEPTANCE = {}


@pytest.fixture
def report():
    """Record one acceptance check; returns ``passed`` so tests can assert on it."""
    def record(criterion, name, passed, detail=""):
        ACCEPTANCE.setdefault(criterion, []).append((name, bool(passed), detail))
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: (int("".join(ch for ch in c if ch.isdigit()) or 0), c)):
        for name, passed, detail in ACCEPTANCE[crit]:
            tr.write_line(f"criterion {crit:>4} {'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())


# ------------------------------------------------------------ desk scale

@pytest.fixture(scope="session")
def desk_dataset():
    """250 reconstructed and homogenized designs at N = 64, 50 held out."""
    raw = generate_doe(DoeSpec(n_rho=4, seed=0, count=250))
    return build_dataset(raw, n=64, seed=0, n_test=50)


@pytest.fixture(scope="session")
def desk_surrogate(desk_dataset):
    return LameSurrogate.fit(desk_dataset, n_restarts=5, seed=0)


DESK_MESH = {"nx": 40, "ny": 10, "supports": ["left"], "load_at": "bottom_right", "load_kind": "force",
             "magnitude": 1e5}


@pytest.fixture(scope="session")
def desk_runs(desk_surrogate):
    """Cantilever designs at 40x10 and F = 1e5 for every mode, 300 iterations each."""
    mesh = build_mesh(**DESK_MESH)
    runs = {}
    for mode in ("linear", "single_scale", "multiscale"):
        problem = ToProblem(mesh, "J1", mode, surrogate=desk_surrogate)
        runs[mode] = (problem, optimize(problem, DesignNet.initialize(0), OptimizerConfig(iterations=300)))
    return runs
