"""Strong-stability-preserving three-stage Runge-Kutta stepping and run
diagnostics (mean blending coefficient, total entropy)."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import physics
from .limiting import StageContext
from .mesh import Mesh2D, integrate_nodal
from .operators import SbpOperator1D
from .physics import EquationParams

# Shu-Osher stage coefficients: u_stage = a*u0 + b*u_prev + c*dt*L(u_prev)
_STAGES = ((0.0, 1.0, 1.0), (0.75, 0.25, 0.25), (1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0))


class NumericalFailure(RuntimeError):
    def __init__(self, message, stage=None, node=None, time=None):
        super().__init__(message)
        self.stage = stage
        self.node = node
        self.time = time


def _check_finite(u, stage, t):
    if not np.all(np.isfinite(u)):
        node = tuple(np.argwhere(~np.isfinite(u))[0])
        raise NumericalFailure(
            f"non-finite state after stage {stage} (t={t}) at index {node}",
            stage=stage,
            node=node,
            time=t,
        )


def ssp_rk3_step(field, dt, rhs_evaluator=None, limiter=None, ctx: StageContext = None,
                 t=None, stage_alphas=None):
    """One step of the three-stage SSP Runge-Kutta scheme.

    Either a plain ``rhs_evaluator(field) -> rates`` or a limiter (with its
    stage context) drives the stage updates; the limiter runs its
    coefficient selection and correction inside every stage.  When
    ``stage_alphas`` is a list, the per-stage nodal coefficients are
    appended to it.
    """
    if (rhs_evaluator is None) == (limiter is None):
        raise ValueError("provide exactly one of rhs_evaluator or limiter")
    u0 = field
    u = field
    for s, (a, b, c) in enumerate(_STAGES):
        base = b * u if a == 0.0 else a * u0 + b * u
        if limiter is None:
            u = base + (c * dt) * rhs_evaluator(u)
        else:
            u, alpha = limiter.advance_stage(base, u, c * dt, ctx)
            if stage_alphas is not None:
                stage_alphas.append(alpha)
        if isinstance(u, np.ndarray):
            _check_finite(u, s, t)
    return u


def mean_alpha(stage_alphas, mesh: Mesh2D, op: SbpOperator1D) -> float:
    """Quadrature-weighted domain mean of the nodal blending coefficient,
    averaged over the recorded stages."""
    if not stage_alphas:
        raise ValueError("mean_alpha of an empty stage window")
    area = mesh.area
    total = 0.0
    for alpha in stage_alphas:
        total += integrate_nodal(mesh, op, alpha) / area
    return total / len(stage_alphas)


def total_entropy(field, mesh: Mesh2D, op: SbpOperator1D, params: EquationParams) -> float:
    """S = -integral of rho s / (gamma - 1), s = ln(p rho^-gamma)."""
    s = physics.specific_entropy(field, params)
    return -integrate_nodal(mesh, op, field[..., physics.RHO] * s) / (params.gamma - 1.0)


def total_mass(field, mesh: Mesh2D, op: SbpOperator1D) -> float:
    return integrate_nodal(mesh, op, field[..., physics.RHO])


DIAGNOSTIC_COLUMNS = ("t", "mean_alpha", "total_entropy", "min_rho", "min_p")


@dataclass
class DiagnosticsWriter:
    """Accumulates per-stage coefficients and samples scalar diagnostics."""

    mesh: Mesh2D
    op: SbpOperator1D
    params: EquationParams
    path: str | None = None
    interval: float = 0.01
    rows: list = field(default_factory=list)
    _window: list = field(default_factory=list)
    _next_sample: float = 0.0
    _file: object = None
    _writer: object = None

    def __post_init__(self):
        if self.path is not None:
            self._file = open(self.path, "w", newline="")
            self._writer = csv.writer(self._file)
            self._writer.writerow(DIAGNOSTIC_COLUMNS)

    def record_stages(self, stage_alphas):
        self._window.extend(stage_alphas)

    def sample(self, t, field):
        if self.rows and t <= self.rows[-1][0]:
            raise ValueError("diagnostic timestamps must be strictly increasing")
        alpha_bar = (
            mean_alpha(self._window, self.mesh, self.op) if self._window else 0.0
        )
        self._window.clear()
        row = (
            t,
            alpha_bar,
            total_entropy(field, self.mesh, self.op, self.params),
            float(np.min(field[..., physics.RHO])),
            float(np.min(physics.pressure(field, self.params))),
        )
        self.rows.append(row)
        if self._writer is not None:
            self._writer.writerow([f"{v:.17g}" for v in row])
            self._file.flush()
        self._next_sample = t + self.interval
        return row

    def maybe_sample(self, t, field):
        if t >= self._next_sample - 1e-12:
            return self.sample(t, field)
        return None

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None
            self._writer = None
