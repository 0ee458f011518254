import subprocess
import sys

import pytest


def run_solver(args):
    """Invoke the solver CLI in a subprocess; skip if it is not installed."""
    cmd = [sys.executable, "-m", "sbpmhd"] + args
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=600)
    except FileNotFoundError:  # pragma: no cover
        pytest.skip("solver package not available")
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def vortex_run(tmp_path_factory):
    """A small limited vortex run: snapshots, diagnostics, and a slice."""
    out = tmp_path_factory.mktemp("vortex") / "run"
    run_solver([
        "run", "--problem", "orszag_tang", "--scheme", "lgl:3", "--dof", "64",
        "--limiter", "loehner", "--blend", "subcell", "--t-end", "0.1",
        "--outdir", str(out), "--slice", "y=0.4277",
    ])
    return out


@pytest.fixture(scope="session")
def unlimited_run(tmp_path_factory):
    """A short unlimited run: the alpha column must be identically zero."""
    out = tmp_path_factory.mktemp("unlimited") / "run"
    run_solver([
        "run", "--problem", "orszag_tang", "--scheme", "lgl:3", "--dof", "32",
        "--limiter", "none", "--t-end", "0.005", "--outdir", str(out),
    ])
    return out


@pytest.fixture(scope="session")
def rotor_initial(tmp_path_factory):
    """The rotor initial condition only (t_end = 0)."""
    out = tmp_path_factory.mktemp("rotor") / "run"
    run_solver([
        "run", "--problem", "rotor", "--scheme", "lgl:3", "--dof", "64",
        "--t-end", "0", "--outdir", str(out),
    ])
    return out


def first_snapshot(out_dir):
    return sorted(out_dir.glob("snapshot_*.csv"))[0]


def last_snapshot(out_dir):
    return sorted(out_dir.glob("snapshot_*.csv"))[-1]
