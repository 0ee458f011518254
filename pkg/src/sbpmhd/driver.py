"""Command-line driver: configuration, orchestration, and output writing.

Subcommands:
  run               advance a benchmark and write snapshots/diagnostics
  check-ops         print the structural validation report of an operator
  equivalence-test  compare the direct and staggered-flux evaluations

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
import time
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import numpy as np

from . import __version__, benchmarks, fluxes, physics
from .fluxes import VolumeFluxUnavailable
from .limiting import StageContext, make_limiter
from .mesh import Mesh2D, init_field, node_coordinates
from .operators import build_fd_sbp_operator, build_lgl_operator, verify_sbp
from .physics import AdmissibilityError, EquationParams
from .semidisc import compute_rhs_direct
from .fluxdiff import compute_rhs_fluxdiff
from .timeint import DiagnosticsWriter, NumericalFailure, ssp_rk3_step

SNAPSHOT_COLUMNS = "x,y,rho,mx,my,mz,rhoE,B1,B2,B3,psi,p,alpha"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    problem: str
    scheme_kind: str = "lgl"
    scheme_order: int = 3
    dof_per_axis: int = 128
    volume_flux: str = "central"
    limiter: str = "none"
    blend_mode: str = "subcell"
    loehner_eps: float = 0.2
    idp_density: bool = True
    idp_entropy: bool = True
    c_h: float | None = None
    dt: float | None = None
    t_end: float | None = None
    out_dir: str = "out"
    snapshot_dt: float | None = None
    diag_dt: float = 0.01
    slices: list = dataclass_field(default_factory=list)  # (axis, coord) pairs


def parse_scheme(text: str):
    try:
        kind, order = text.split(":")
        return kind.strip(), int(order)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"scheme must look like 'lgl:3' or 'fdsbp:13', got '{text}'"
        ) from None


def parse_slice(text: str):
    try:
        axis, coord = text.split("=")
        axis = axis.strip().lower()
        if axis not in ("x", "y"):
            raise ValueError
        return axis, float(coord)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"slice must look like 'y=0.4277', got '{text}'"
        ) from None


def _read_config_file(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: '{raw}'")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbpmhd")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="advance a benchmark problem")
    run_p.add_argument("--config", help="key=value file supplying defaults")
    run_p.add_argument("--problem", choices=benchmarks.problem_names())
    run_p.add_argument("--scheme", type=parse_scheme, default=None,
                       help="operator: lgl:<degree> or fdsbp:<nodes>")
    run_p.add_argument("--dof", type=int, default=None, help="nodes per axis")
    run_p.add_argument("--volume-flux", choices=("central", "ec"), default=None)
    run_p.add_argument("--limiter", choices=("none", "loehner", "idp", "fv"), default=None)
    run_p.add_argument("--blend", choices=("element", "subcell"), default=None)
    run_p.add_argument("--loehner-eps", type=float, default=None)
    run_p.add_argument("--idp-density", type=int, choices=(0, 1), default=None)
    run_p.add_argument("--idp-entropy", type=int, choices=(0, 1), default=None)
    run_p.add_argument("--ch", type=float, default=None, help="cleaning speed override")
    run_p.add_argument("--dt", type=float, default=None)
    run_p.add_argument("--t-end", type=float, default=None)
    run_p.add_argument("--outdir", default=None)
    run_p.add_argument("--snapshot-dt", type=float, default=None)
    run_p.add_argument("--diag-dt", type=float, default=None)
    run_p.add_argument("--slice", type=parse_slice, action="append", default=None,
                       help="axis=coord, e.g. y=0.4277 (repeatable)")

    ops_p = sub.add_parser("check-ops", help="validate an operator's structure")
    ops_p.add_argument("--kind", choices=("lgl", "fdsbp"), required=True)
    ops_p.add_argument("--n", type=int, required=True,
                       help="polynomial degree (lgl) or node count (fdsbp)")

    eq_p = sub.add_parser("equivalence-test",
                          help="max deviation between the direct and staggered RHS")
    eq_p.add_argument("--scheme", type=parse_scheme, default=("lgl", 3))
    eq_p.add_argument("--seed", type=int, default=0)
    eq_p.add_argument("--fields", type=int, default=50)
    eq_p.add_argument("--elements", type=int, default=4)
    return parser


def cli_parse(argv) -> RunConfig:
    """Parse a `run` command line (config file defaults, flags override)."""
    args = _build_parser().parse_args(argv)
    if args.command != "run":
        raise ValueError("cli_parse handles the run subcommand")
    return _run_config_from_args(args)


def _run_config_from_args(args) -> RunConfig:
    file_vals = _read_config_file(args.config) if args.config else {}

    def pick(flag_val, key, conv, default):
        if flag_val is not None:
            return flag_val
        if key in file_vals:
            return conv(file_vals[key])
        return default

    problem = pick(args.problem, "problem", str, None)
    if problem is None:
        raise ValueError(
            "no problem selected; valid problems: " + ", ".join(benchmarks.problem_names())
        )
    if problem not in benchmarks.problem_names():
        raise ValueError(
            f"unknown problem '{problem}'; valid problems: "
            + ", ".join(benchmarks.problem_names())
        )
    scheme = pick(args.scheme, "scheme", parse_scheme, ("lgl", 3))
    slices = args.slice
    if slices is None and "slice" in file_vals:
        slices = [parse_slice(s) for s in file_vals["slice"].split(",")]
    return RunConfig(
        problem=problem,
        scheme_kind=scheme[0],
        scheme_order=scheme[1],
        dof_per_axis=pick(args.dof, "dof", int, 128),
        volume_flux=pick(args.volume_flux, "volume_flux", str, "central"),
        limiter=pick(args.limiter, "limiter", str, "none"),
        blend_mode=pick(args.blend, "blend_mode", str, "subcell"),
        loehner_eps=pick(args.loehner_eps, "loehner_eps", float, 0.2),
        idp_density=bool(pick(args.idp_density, "idp_density", int, 1)),
        idp_entropy=bool(pick(args.idp_entropy, "idp_entropy", int, 1)),
        c_h=pick(args.ch, "c_h", float, None),
        dt=pick(args.dt, "dt", float, None),
        t_end=pick(args.t_end, "t_end", float, None),
        out_dir=pick(args.outdir, "outdir", str, "out"),
        snapshot_dt=pick(args.snapshot_dt, "snapshot_dt", float, None),
        diag_dt=pick(args.diag_dt, "diag_dt", float, 0.01),
        slices=slices or [],
    )


def _version_string() -> str:
    try:
        sha = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True, text=True, timeout=5, check=True,
        ).stdout.strip()
        return f"{__version__}+g{sha}"
    except Exception:
        return __version__


def write_snapshot(path, field, mesh, op, params, node_alpha):
    x, y = node_coordinates(mesh, op)
    p = physics.pressure(field, params)
    cols = [x, y] + [field[..., k] for k in range(9)] + [p, node_alpha]
    flat = np.stack([c.reshape(-1) for c in cols], axis=1)
    with open(path, "w", newline="") as fh:
        fh.write(SNAPSHOT_COLUMNS + "\n")
        np.savetxt(fh, flat, fmt="%.17g", delimiter=",")


def write_slice(path, field, mesh, op, params, node_alpha, axis, coord):
    """Nearest node line to the requested coordinate, sorted along the axis."""
    x, y = node_coordinates(mesh, op)
    if axis == "y":
        levels = y[0, :, 0, :]  # (ny, n)
        flat_idx = np.argmin(np.abs(levels - coord))
        ey, j = np.unravel_index(flat_idx, levels.shape)
        sel = (slice(None), ey, slice(None), j)
    else:
        levels = x[:, 0, :, 0]  # (nx, n)
        flat_idx = np.argmin(np.abs(levels - coord))
        ex, i = np.unravel_index(flat_idx, levels.shape)
        sel = (ex, slice(None), i, slice(None))
    p = physics.pressure(field, params)
    cols = [x[sel], y[sel]] + [field[sel + (k,)] for k in range(9)] + [p[sel], node_alpha[sel]]
    flat = np.stack([c.reshape(-1) for c in cols], axis=1)
    order = np.argsort(flat[:, 0] if axis == "y" else flat[:, 1], kind="stable")
    with open(path, "w", newline="") as fh:
        fh.write(SNAPSHOT_COLUMNS + "\n")
        np.savetxt(fh, flat[order], fmt="%.17g", delimiter=",")


def _write_manifest(path, config: RunConfig, setup, status, wall_time, failure=None):
    lines = [
        f"problem={config.problem}",
        f"scheme={config.scheme_kind}:{config.scheme_order}",
        f"dof_per_axis={config.dof_per_axis}",
        f"elements={setup.mesh.nx}x{setup.mesh.ny}" if setup else "elements=unset",
        f"volume_flux={config.volume_flux}",
        f"limiter={config.limiter}",
        f"blend_mode={config.blend_mode}",
        f"loehner_eps={config.loehner_eps}",
        f"idp_density={int(config.idp_density)}",
        f"idp_entropy={int(config.idp_entropy)}",
        f"c_h={setup.params.c_h if setup else config.c_h}",
        f"dt={setup.dt if setup else config.dt}",
        f"t_end={setup.t_end if setup else config.t_end}",
        f"diag_dt={config.diag_dt}",
        f"snapshot_dt={config.snapshot_dt}",
        f"version={_version_string()}",
        f"wall_time_s={wall_time:.3f}",
        f"status={status}",
    ]
    if failure:
        lines.append(f"failure={failure}")
    Path(path).write_text("\n".join(lines) + "\n")


def run(config: RunConfig) -> int:
    """Advance the configured problem; returns a process exit code."""
    t_start = time.perf_counter()
    out = Path(config.out_dir)
    try:
        setup = benchmarks.configure_run(
            config.problem, config.scheme_kind, config.scheme_order,
            config.dof_per_axis, dt=config.dt, t_end=config.t_end, c_h=config.c_h,
        )
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        volume = fluxes.get_volume_flux(config.volume_flux)
    except VolumeFluxUnavailable as exc:
        print(f"warning: {exc}; falling back to central", file=sys.stderr)
        volume = fluxes.get_volume_flux("central")

    out.mkdir(parents=True, exist_ok=True)
    mesh, op, params = setup.mesh, setup.op, setup.params
    field = init_field(mesh, op, setup.problem.initializer, params)
    limiter = make_limiter(
        config.limiter, mode=config.blend_mode, loehner_eps=config.loehner_eps,
        idp_density=config.idp_density, idp_entropy=config.idp_entropy,
    )
    ctx = StageContext(op=op, mesh=mesh, params=params, volume=volume)
    diag = DiagnosticsWriter(mesh=mesh, op=op, params=params,
                             path=str(out / "diagnostics.csv"), interval=config.diag_dt)

    node_alpha = np.zeros(field.shape[:4])
    n_snap = 0

    def snapshot(t):
        nonlocal n_snap
        write_snapshot(out / f"snapshot_{n_snap:04d}_t{t:.6f}.csv",
                       field, mesh, op, params, node_alpha)
        n_snap += 1

    status, failure = "ok", None
    try:
        t = 0.0
        diag.sample(t, field)
        snapshot(t)
        next_snapshot = config.snapshot_dt if config.snapshot_dt else np.inf
        while t < setup.t_end - 1e-12:
            dt_step = min(setup.dt, setup.t_end - t)
            stage_alphas = []
            field = ssp_rk3_step(field, dt_step, limiter=limiter, ctx=ctx, t=t,
                                 stage_alphas=stage_alphas)
            node_alpha = stage_alphas[-1]
            t += dt_step
            diag.record_stages(stage_alphas)
            diag.maybe_sample(t, field)
            if t >= next_snapshot - 1e-12:
                snapshot(t)
                next_snapshot += config.snapshot_dt
        if setup.t_end > 0.0:
            if diag.rows[-1][0] < setup.t_end - 1e-12:
                diag.sample(t, field)
            snapshot(t)
            for axis, coord in config.slices:
                write_slice(out / f"slice_{axis}{coord:.6f}_t{t:.6f}.csv",
                            field, mesh, op, params, node_alpha, axis, coord)
    except (NumericalFailure, AdmissibilityError) as exc:
        status, failure = "failed", str(exc)
        print(f"numerical failure: {exc}", file=sys.stderr)
    finally:
        diag.close()
        _write_manifest(out / "manifest.txt", config, setup, status,
                        time.perf_counter() - t_start, failure)
    return EXIT_OK if status == "ok" else EXIT_NUMERICAL


def random_admissible_field(shape, rng: np.random.Generator, params: EquationParams):
    prim = np.empty(shape)
    prim[..., 0] = rng.uniform(0.5, 2.0, shape[:-1])
    prim[..., 1:4] = rng.uniform(-1.0, 1.0, shape[:-1] + (3,))
    prim[..., 4] = rng.uniform(0.5, 2.0, shape[:-1])
    prim[..., 5:8] = rng.uniform(-1.0, 1.0, shape[:-1] + (3,))
    prim[..., 8] = rng.uniform(-0.5, 0.5, shape[:-1])
    return physics.prim_to_cons(prim, params)


def equivalence_deviation(scheme_kind: str, order_param: int, seed: int = 0,
                          n_fields: int = 50, elements: int = 4) -> float:
    """Max scaled nodal deviation between the two RHS evaluations."""
    op = benchmarks.build_operator(scheme_kind, order_param)
    mesh = Mesh2D(nx=elements, ny=elements)
    params = EquationParams()
    rng = np.random.default_rng(seed)
    shape = (mesh.nx, mesh.ny, op.n_nodes, op.n_nodes, 9)
    worst = 0.0
    for _ in range(n_fields):
        field = random_admissible_field(shape, rng, params)
        direct = compute_rhs_direct(field, op, mesh, params)
        staggered = compute_rhs_fluxdiff(field, op, mesh, params)
        dev = np.max(np.abs(direct - staggered) / (1.0 + np.abs(direct)))
        worst = max(worst, float(dev))
    return worst


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        try:
            config = _run_config_from_args(args)
        except ValueError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return run(config)
    if args.command == "check-ops":
        try:
            op = (build_lgl_operator(args.n) if args.kind == "lgl"
                  else build_fd_sbp_operator(args.n))
        except ValueError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(verify_sbp(op))
        return EXIT_OK
    if args.command == "equivalence-test":
        kind, order = args.scheme
        dev = equivalence_deviation(kind, order, seed=args.seed,
                                    n_fields=args.fields, elements=args.elements)
        print(f"max deviation (direct vs staggered): {dev:.3e}")
        return EXIT_OK
    parser.error(f"unknown command {args.command}")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
