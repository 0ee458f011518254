"""Staggered (telescoping) flux computation and the blended right-hand side.

Every 1D line of the split-form SBP scheme can be rewritten so that the
nodal rate is a difference of per-interface, per-side staggered fluxes:
prefix sums of the skew-contracted two-point terms, with the node-local
non-conservative factor applied outside the prefix.  A first-order
finite-volume variant shares the element-boundary fluxes bitwise, and a
per-interface convex blend of the two recovers either scheme at the
extremes.  This is what makes subcell limiting possible for the
non-conservative system.

The direct evaluation in ``semidisc`` is kept structurally independent;
the equivalence of the two paths is a load-bearing test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fluxes, physics
from .fluxes import TwoPointFlux
from .mesh import Mesh2D, from_lines, gather_interface_traces, lines_view
from .operators import SbpOperator1D
from .physics import MAG, PSI, EquationParams

SBP_VARIANT = "SBP"
FV_VARIANT = "FV"


class ContractViolation(ValueError):
    pass


@dataclass
class LineBundle:
    """Per-node quantities shared by the volume, interface, and FV fluxes."""

    u: np.ndarray       # states (..., 9)
    g: np.ndarray       # metric-projected advective flux (..., 9)
    lam: np.ndarray     # |v.n| + fast magnetosonic speed (...)
    bm: np.ndarray      # B . m (...)
    psi: np.ndarray
    loc_powell: np.ndarray
    loc_glm: np.ndarray


def make_line_bundle(u, m, params: EquationParams) -> LineBundle:
    m = np.asarray(m, dtype=float)
    nhat = m / np.linalg.norm(m)
    return LineBundle(
        u=u,
        g=physics.flux_dot_metric(u, m, params),
        lam=np.abs(physics.velocity(u) @ nhat)
        + physics.fast_magnetosonic_speed(u, nhat, params),
        bm=u[..., MAG] @ m,
        psi=u[..., PSI],
        loc_powell=physics.powell_phi(u, params),
        loc_glm=physics.glm_phi_dot_metric(u, m, params),
    )


def _vec(sel):
    """Selector for the (..., node, component) arrays of a bundle."""
    return sel + (slice(None),)


def _rusanov_between(a: LineBundle, b: LineBundle, sel_a, sel_b, norm_m, c_h):
    lam = np.maximum(np.maximum(a.lam[sel_a], b.lam[sel_b]), c_h)
    return 0.5 * (a.g[_vec(sel_a)] + b.g[_vec(sel_b)]) - 0.5 * norm_m * lam[..., None] * (
        b.u[_vec(sel_b)] - a.u[_vec(sel_a)]
    )


def _noncons_between(loc_side: LineBundle, sel_loc, a: LineBundle, b: LineBundle,
                     sel_a, sel_b):
    sym_powell = 0.5 * (a.bm[sel_a] + b.bm[sel_b])
    sym_glm = 0.5 * (a.psi[sel_a] + b.psi[sel_b])
    return (
        loc_side.loc_powell[_vec(sel_loc)] * sym_powell[..., None]
        + loc_side.loc_glm[_vec(sel_loc)] * sym_glm[..., None]
    )


def _boundary_fluxes(line: LineBundle, outer_left: LineBundle, outer_right: LineBundle,
                     norm_m, c_h):
    """Interface flux + non-conservative term at both line ends, +axis oriented."""
    all_ = (Ellipsis,)
    first = (Ellipsis, 0)
    last = (Ellipsis, -1)
    left = _rusanov_between(outer_left, line, all_, first, norm_m, c_h) + _noncons_between(
        line, first, line, outer_left, first, all_
    )
    right = _rusanov_between(line, outer_right, last, all_, norm_m, c_h) + _noncons_between(
        line, last, line, outer_right, last, all_
    )
    return left, right


@dataclass(frozen=True)
class StaggeredFluxSet:
    """Per-side staggered fluxes of a batch of lines.

    gamma_left[..., j, :] is the flux between node j and j-1 as seen from
    node j; gamma_right[..., j, :] between j and j+1.  Index j = 0 (left)
    and j = n-1 (right) hold the element-interface values.  The prefix
    arrays used to build the interior values are kept for inspection: the
    conservative prefixes are shared bitwise by the two sides of every
    interior interface.
    """

    gamma_left: np.ndarray   # (..., n, 9)
    gamma_right: np.ndarray  # (..., n, 9)
    variant: str
    cons_prefix: np.ndarray | None = None    # (..., n, 9) cumulative conservative rows
    powell_prefix: np.ndarray | None = None  # (..., n) cumulative symmetric rows
    glm_prefix: np.ndarray | None = None
    loc_powell: np.ndarray | None = None
    loc_glm: np.ndarray | None = None


def _staggered_sbp_from_bundles(line: LineBundle, boundary, op: SbpOperator1D, m,
                                params: EquationParams,
                                volume: TwoPointFlux) -> StaggeredFluxSet:
    if isinstance(volume, fluxes.CentralFlux):
        pair_cons = 0.5 * (line.g[..., :, None, :] + line.g[..., None, :, :])
    else:
        pair_cons = volume.pair_tensor(line.u, m, params)
    sym_powell = 0.5 * (line.bm[..., :, None] + line.bm[..., None, :])
    sym_glm = 0.5 * (line.psi[..., :, None] + line.psi[..., None, :])
    s = op.S
    rows_cons = np.einsum("lm,...lmc->...lc", s, pair_cons)
    rows_m = np.einsum("lm,...lm->...l", s, sym_powell)
    rows_g = np.einsum("lm,...lm->...l", s, sym_glm)
    cons_prefix = np.cumsum(rows_cons, axis=-2)
    powell_prefix = np.cumsum(rows_m, axis=-1)
    glm_prefix = np.cumsum(rows_g, axis=-1)
    bdry_left, bdry_right = boundary
    loc_m, loc_g = line.loc_powell, line.loc_glm

    gamma_right = np.empty_like(line.u)
    gamma_left = np.empty_like(line.u)
    gamma_right[..., :-1, :] = (
        cons_prefix[..., :-1, :]
        + loc_m[..., :-1, :] * powell_prefix[..., :-1, None]
        + loc_g[..., :-1, :] * glm_prefix[..., :-1, None]
    )
    gamma_right[..., -1, :] = bdry_right
    gamma_left[..., 0, :] = bdry_left
    gamma_left[..., 1:, :] = (
        cons_prefix[..., :-1, :]
        + loc_m[..., 1:, :] * powell_prefix[..., :-1, None]
        + loc_g[..., 1:, :] * glm_prefix[..., :-1, None]
    )
    return StaggeredFluxSet(
        gamma_left=gamma_left,
        gamma_right=gamma_right,
        variant=SBP_VARIANT,
        cons_prefix=cons_prefix,
        powell_prefix=powell_prefix,
        glm_prefix=glm_prefix,
        loc_powell=loc_m,
        loc_glm=loc_g,
    )


def _staggered_fv_from_bundles(line: LineBundle, boundary, norm_m,
                               params: EquationParams) -> StaggeredFluxSet:
    minus = (Ellipsis, slice(None, -1))
    plus = (Ellipsis, slice(1, None))
    rus = _rusanov_between(line, line, minus, plus, norm_m, params.c_h)
    sym_powell = 0.5 * (line.bm[minus] + line.bm[plus])
    sym_glm = 0.5 * (line.psi[minus] + line.psi[plus])
    bdry_left, bdry_right = boundary
    loc_m, loc_g = line.loc_powell, line.loc_glm

    gamma_right = np.empty_like(line.u)
    gamma_left = np.empty_like(line.u)
    gamma_right[..., :-1, :] = (
        rus
        + loc_m[..., :-1, :] * sym_powell[..., None]
        + loc_g[..., :-1, :] * sym_glm[..., None]
    )
    gamma_right[..., -1, :] = bdry_right
    gamma_left[..., 0, :] = bdry_left
    gamma_left[..., 1:, :] = (
        rus
        + loc_m[..., 1:, :] * sym_powell[..., None]
        + loc_g[..., 1:, :] * sym_glm[..., None]
    )
    return StaggeredFluxSet(
        gamma_left=gamma_left,
        gamma_right=gamma_right,
        variant=FV_VARIANT,
        loc_powell=loc_m,
        loc_glm=loc_g,
    )


def _line_boundary(line_states, outer_left, outer_right, metric, params):
    m = np.asarray(metric, dtype=float)
    line = make_line_bundle(np.asarray(line_states, dtype=float), m, params)
    bl = make_line_bundle(np.asarray(outer_left, dtype=float), m, params)
    br = make_line_bundle(np.asarray(outer_right, dtype=float), m, params)
    norm_m = float(np.linalg.norm(m))
    boundary = _boundary_fluxes(line, bl, br, norm_m, params.c_h)
    return line, boundary, norm_m


def compute_staggered_sbp(line_states, outer_left, outer_right, op: SbpOperator1D,
                          metric, params: EquationParams,
                          volume: TwoPointFlux | None = None) -> StaggeredFluxSet:
    """High-order staggered fluxes of a batch of lines (..., n, 9)."""
    if volume is None:
        volume = fluxes.get_volume_flux("central")
    line, boundary, _ = _line_boundary(line_states, outer_left, outer_right, metric, params)
    return _staggered_sbp_from_bundles(line, boundary, op, metric, params, volume)


def compute_staggered_fv(line_states, outer_left, outer_right, metric,
                         params: EquationParams) -> StaggeredFluxSet:
    """First-order subcell finite-volume staggered fluxes.

    Interior interfaces carry the Rusanov flux of the adjacent nodes plus
    the non-conservative split with the local factor of the owning side;
    element-boundary interfaces reuse the high-order interface values, so
    they match the SBP variant bitwise.
    """
    line, boundary, norm_m = _line_boundary(line_states, outer_left, outer_right,
                                            metric, params)
    return _staggered_fv_from_bundles(line, boundary, norm_m, params)


def blended_rhs(sbp: StaggeredFluxSet, fv: StaggeredFluxSet, interface_alpha,
                weights, jac) -> np.ndarray:
    """Nodal rates of a batch of lines from per-interface convex blending.

    interface_alpha (..., n+1): entry k belongs to the interface between
    node k-1 and node k (k = 0 and k = n are the element boundaries).
    """
    a = np.asarray(interface_alpha, dtype=float)
    if a.shape[-1] != sbp.gamma_left.shape[-2] + 1:
        raise ContractViolation("one blending coefficient per interface is required")
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise ContractViolation("blending coefficients must lie in [0, 1]")
    a_left = a[..., :-1, None]
    a_right = a[..., 1:, None]
    g_left = (1.0 - a_left) * sbp.gamma_left + a_left * fv.gamma_left
    g_right = (1.0 - a_right) * sbp.gamma_right + a_right * fv.gamma_right
    return (g_left - g_right) / (jac * np.asarray(weights)[:, None])


@dataclass
class AxisSets:
    sbp: StaggeredFluxSet
    fv: StaggeredFluxSet


@dataclass
class RhsSets:
    """Both staggered-flux variants for both axes of a 2D field."""

    x: AxisSets
    y: AxisSets


def compute_axis_sets(field, op: SbpOperator1D, mesh: Mesh2D, params: EquationParams,
                      volume: TwoPointFlux | None = None) -> RhsSets:
    """Staggered fluxes of every line of the field, both variants, both axes."""
    if volume is None:
        volume = fluxes.get_volume_flux("central")
    physics.check_admissible(field, params, where="(rhs input)")
    sets = []
    for axis in (0, 1):
        U = lines_view(field, axis)
        outer_left, outer_right = gather_interface_traces(field, mesh, axis)
        m = mesh.axis_metric(axis)
        line, boundary, norm_m = _line_boundary(U, outer_left, outer_right, m, params)
        sbp = _staggered_sbp_from_bundles(line, boundary, op, m, params, volume)
        fv = _staggered_fv_from_bundles(line, boundary, norm_m, params)
        sets.append(AxisSets(sbp=sbp, fv=fv))
    return RhsSets(x=sets[0], y=sets[1])


def assemble_rates(sets: RhsSets, iface_x, iface_y, op: SbpOperator1D, mesh: Mesh2D):
    """2D nodal rates from precomputed staggered fluxes and interface blends."""
    jac = mesh.metric.J
    rx = blended_rhs(sets.x.sbp, sets.x.fv, iface_x, op.weights, jac)
    ry = blended_rhs(sets.y.sbp, sets.y.fv, iface_y, op.weights, jac)
    return from_lines(rx, 0) + from_lines(ry, 1)


def uniform_interface_alpha(mesh: Mesh2D, op: SbpOperator1D, value: float):
    """Constant interface-blend arrays for both axes (line layout)."""
    n = op.n_nodes
    shape = (mesh.nx, mesh.ny, n, n + 1)
    return np.full(shape, value), np.full(shape, value)


def compute_rhs_fluxdiff(field, op: SbpOperator1D, mesh: Mesh2D, params: EquationParams,
                         volume: TwoPointFlux | None = None, blend=None):
    """Time derivative via staggered fluxes; equals the direct evaluation
    when all blending coefficients vanish."""
    sets = compute_axis_sets(field, op, mesh, params, volume)
    if blend is None:
        iface_x, iface_y = uniform_interface_alpha(mesh, op, 0.0)
    else:
        iface_x, iface_y = blend.iface_x, blend.iface_y
    return assemble_rates(sets, iface_x, iface_y, op, mesh)
