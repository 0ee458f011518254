"""Initial conditions and run recipes for the two benchmark problems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import Mesh2D
from .operators import FDSBP, LGL, SbpOperator1D, build_fd_sbp_operator, build_lgl_operator
from .physics import EquationParams

# the published reference pairing of resolution and step size
_DT_REFERENCE = 8.0e-5
_DOF_REFERENCE = 1024


@dataclass(frozen=True)
class ProblemSetup:
    name: str
    lx: float
    ly: float
    initializer: Callable  # (x, y) -> primitive states (..., 9)
    params: EquationParams
    t_end_default: float
    periodic: tuple = (True, True)


def init_orszag_tang(x, y):
    """Smooth periodic vortex that steepens into interacting MHD shocks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    prim = np.zeros(x.shape + (9,))
    prim[..., 0] = 25.0 / (36.0 * np.pi)
    prim[..., 1] = -np.sin(2.0 * np.pi * y)
    prim[..., 2] = np.sin(2.0 * np.pi * x)
    prim[..., 4] = 5.0 / (12.0 * np.pi)
    prim[..., 5] = -np.sin(2.0 * np.pi * y) / np.sqrt(4.0 * np.pi)
    prim[..., 6] = -np.sin(4.0 * np.pi * x) / np.sqrt(4.0 * np.pi)
    return prim


def init_rotor(x, y, r0: float = 0.1, r1: float = 0.115, u0: float = 2.0):
    """Dense rotating disk in a light ambient medium, uniform B and p."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
    f = (r1 - r) / (r1 - r0)
    inner = r < r0
    ring = (r >= r0) & (r < r1)
    prim = np.zeros(x.shape + (9,))
    prim[..., 0] = np.where(inner, 10.0, np.where(ring, 1.0 + 9.0 * f, 1.0))
    scale = np.where(inner, u0 / r0, np.where(ring, f * u0 / r0, 0.0))
    prim[..., 1] = scale * (0.5 - y)
    prim[..., 2] = scale * (x - 0.5)
    prim[..., 4] = 1.0
    prim[..., 5] = 5.0 / (4.0 * np.pi)
    return prim


_PROBLEMS = {
    "orszag_tang": ProblemSetup(
        name="orszag_tang",
        lx=1.0,
        ly=1.0,
        initializer=init_orszag_tang,
        params=EquationParams(gamma=5.0 / 3.0, mu0=1.0, c_h=1.0),
        t_end_default=1.0,
    ),
    "rotor": ProblemSetup(
        name="rotor",
        lx=1.0,
        ly=1.0,
        initializer=init_rotor,
        params=EquationParams(gamma=5.0 / 3.0, mu0=1.0, c_h=1.0),
        t_end_default=0.15,
    ),
}


def problem_names():
    return sorted(_PROBLEMS)


def get_problem(name: str) -> ProblemSetup:
    try:
        return _PROBLEMS[name]
    except KeyError:
        raise ValueError(
            f"unknown problem '{name}'; valid problems: {', '.join(problem_names())}"
        ) from None


def build_operator(scheme_kind: str, order_param: int) -> SbpOperator1D:
    if scheme_kind == LGL:
        return build_lgl_operator(order_param)
    if scheme_kind == FDSBP:
        return build_fd_sbp_operator(order_param)
    raise ValueError(f"unknown scheme kind '{scheme_kind}' (expected lgl or fdsbp)")


@dataclass(frozen=True)
class RunSetup:
    problem: ProblemSetup
    mesh: Mesh2D
    op: SbpOperator1D
    params: EquationParams
    dt: float
    t_end: float


def configure_run(name: str, scheme_kind: str, order_param: int, dof_per_axis: int,
                  dt: float | None = None, t_end: float | None = None,
                  c_h: float | None = None) -> RunSetup:
    """Mesh, operator and step size for a benchmark at a given resolution.

    The step size scales linearly with the node spacing from the reference
    pairing (dt = 8e-5 at 1024 nodes per axis) unless overridden.
    """
    problem = get_problem(name)
    op = build_operator(scheme_kind, order_param)
    n = op.n_nodes
    if dof_per_axis % n != 0:
        raise ValueError(
            f"{dof_per_axis} nodes per axis is not divisible by the "
            f"{n}-node element of scheme {scheme_kind}"
        )
    elements = dof_per_axis // n
    mesh = Mesh2D(nx=elements, ny=elements, lx=problem.lx, ly=problem.ly)
    if dt is None:
        dt = _DT_REFERENCE * _DOF_REFERENCE / dof_per_axis
    params = problem.params if c_h is None else EquationParams(
        gamma=problem.params.gamma, mu0=problem.params.mu0, c_h=c_h
    )
    return RunSetup(
        problem=problem,
        mesh=mesh,
        op=op,
        params=params,
        dt=dt,
        t_end=problem.t_end_default if t_end is None else t_end,
    )
