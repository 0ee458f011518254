"""Uniform Cartesian 2D tensor-product meshes and field utilities.

A solution field is an array of shape (nx, ny, n, n, 9): element indices,
then the xi/eta node indices of the tensor-product operator, then the
conserved variables.  Axis 0 of a "line view" always means the direction
of differentiation; helpers below rearrange between the two layouts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SbpOperator1D
from .physics import NVARS, EquationParams, prim_to_cons


class UnsupportedFeatureError(NotImplementedError):
    pass


@dataclass(frozen=True)
class MetricData:
    """Constant per-element mapping data of a Cartesian element."""

    J: float
    Ja1: np.ndarray  # (dy/2, 0, 0)
    Ja2: np.ndarray  # (0, dx/2, 0)


@dataclass(frozen=True)
class Mesh2D:
    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0
    x0: float = 0.0
    y0: float = 0.0
    periodic_x: bool = True
    periodic_y: bool = True

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("element counts must be positive")
        if self.lx <= 0.0 or self.ly <= 0.0:
            raise ValueError("domain extents must be positive")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def metric(self) -> MetricData:
        return MetricData(
            J=self.dx * self.dy / 4.0,
            Ja1=np.array([self.dy / 2.0, 0.0, 0.0]),
            Ja2=np.array([0.0, self.dx / 2.0, 0.0]),
        )

    @property
    def area(self) -> float:
        return self.lx * self.ly

    def axis_metric(self, axis: int) -> np.ndarray:
        return self.metric.Ja1 if axis == 0 else self.metric.Ja2


def node_coordinates(mesh: Mesh2D, op: SbpOperator1D):
    """Physical (x, y) of every node, each shaped (nx, ny, n, n)."""
    ref = (op.nodes + 1.0) / 2.0
    ex = np.arange(mesh.nx)
    ey = np.arange(mesh.ny)
    x1d = mesh.x0 + (ex[:, None] + ref[None, :]) * mesh.dx  # (nx, n)
    y1d = mesh.y0 + (ey[:, None] + ref[None, :]) * mesh.dy  # (ny, n)
    x = np.broadcast_to(x1d[:, None, :, None], (mesh.nx, mesh.ny, op.n_nodes, op.n_nodes))
    y = np.broadcast_to(y1d[None, :, None, :], (mesh.nx, mesh.ny, op.n_nodes, op.n_nodes))
    return x.copy(), y.copy()


def init_field(mesh: Mesh2D, op: SbpOperator1D, initializer, params: EquationParams):
    """Collocate a primitive-state initializer onto the mesh nodes."""
    x, y = node_coordinates(mesh, op)
    prim = initializer(x, y)
    return prim_to_cons(prim, params)


def solution_shape(mesh: Mesh2D, op: SbpOperator1D):
    return (mesh.nx, mesh.ny, op.n_nodes, op.n_nodes, NVARS)


def lines_view(arr: np.ndarray, axis: int) -> np.ndarray:
    """View with the differentiation direction second-to-last.

    axis 0 (xi/x): (nx, ny, i, j, 9) -> (nx, ny, j, i, 9)
    axis 1 (eta/y): already (nx, ny, i, j, 9).
    """
    if axis == 0:
        return np.swapaxes(arr, 2, 3)
    return arr


def from_lines(arr_lines: np.ndarray, axis: int) -> np.ndarray:
    if axis == 0:
        return np.swapaxes(arr_lines, 2, 3)
    return arr_lines


def gather_interface_traces(field: np.ndarray, mesh: Mesh2D, axis: int):
    """Exterior traces of every element line along one axis, in line layout.

    Returns (left_outer, right_outer), each (nx, ny, n, 9): the neighbor
    element's facing boundary nodes.  Only periodic axes are supported.
    """
    periodic = mesh.periodic_x if axis == 0 else mesh.periodic_y
    if not periodic:
        raise UnsupportedFeatureError("non-periodic boundaries are not supported")
    if axis == 0:
        left = np.roll(field[:, :, -1, :, :], 1, axis=0)
        right = np.roll(field[:, :, 0, :, :], -1, axis=0)
    else:
        left = np.roll(field[:, :, :, -1, :], 1, axis=1)
        right = np.roll(field[:, :, :, 0, :], -1, axis=1)
    return left, right


def nodal_mass(mesh: Mesh2D, op: SbpOperator1D) -> np.ndarray:
    """Physical quadrature mass J w_i w_j per node, shape (n, n)."""
    w = op.weights
    return mesh.metric.J * w[:, None] * w[None, :]


def integrate_nodal(mesh: Mesh2D, op: SbpOperator1D, q: np.ndarray) -> float:
    """Quadrature of a nodal scalar (nx, ny, n, n) over the domain."""
    return float(np.sum(q * nodal_mass(mesh, op)[None, None, :, :]))


def subcell_grid(field_nodal: np.ndarray, nx: int, ny: int, n: int) -> np.ndarray:
    """Reshape (nx, ny, n, n, ...) to the assembled grid (nx*n, ny*n, ...)."""
    extra = field_nodal.shape[4:]
    return (
        field_nodal.transpose(0, 2, 1, 3, *range(4, field_nodal.ndim))
        .reshape(nx * n, ny * n, *extra)
    )


def from_subcell_grid(grid: np.ndarray, nx: int, ny: int, n: int) -> np.ndarray:
    extra = grid.shape[2:]
    return (
        grid.reshape(nx, n, ny, n, *extra)
        .transpose(0, 2, 1, 3, *range(4, 4 + len(extra)))
    )
