"""Direct split-form SBP semidiscretization on periodic Cartesian meshes.

Per 1D line, the nodal rate is the skew part of the operator contracted
against all two-point volume terms, corrected at the line ends by interface
fluxes; transverse quadrature weights cancel against the tensor-product
mass, so each axis contributes (line terms) / (J * w_along).

This path is the reference evaluation; the staggered-flux path in
``fluxdiff`` must reproduce it when no blending is applied.
"""

from __future__ import annotations

import numpy as np

from . import fluxes, physics
from .fluxes import TwoPointFlux
from .mesh import Mesh2D, from_lines, gather_interface_traces, lines_view
from .operators import SbpOperator1D
from .physics import MAG, PSI, EquationParams


def line_pair_factors(U, m, params: EquationParams, volume: TwoPointFlux):
    """Pair tensors and local factors for a batch of lines U (..., n, 9).

    Returns (pair_cons, sym_powell, sym_glm, loc_powell, loc_glm) where the
    pair tensors have node-pair axes (..., n, n[, 9]).
    """
    pair_cons = volume.pair_tensor(U, m, params)
    bm = U[..., MAG] @ np.asarray(m, dtype=float)
    sym_powell = 0.5 * (bm[..., :, None] + bm[..., None, :])
    psi = U[..., PSI]
    sym_glm = 0.5 * (psi[..., :, None] + psi[..., None, :])
    loc_powell = physics.powell_phi(U, params)
    loc_glm = physics.glm_phi_dot_metric(U, m, params)
    return pair_cons, sym_powell, sym_glm, loc_powell, loc_glm


def line_surface_terms(U, outer_left, outer_right, m, params: EquationParams):
    """Interface flux + non-conservative term at both ends of each line.

    Both values are oriented along +axis; the left one is the flux entering
    through the left face (exterior state on the minus side).
    """
    u_first = U[..., 0, :]
    u_last = U[..., -1, :]
    left = fluxes.rusanov_surface_flux(outer_left, u_first, m, params) + fluxes.surface_noncons(
        u_first, outer_left, m, params
    )
    right = fluxes.rusanov_surface_flux(u_last, outer_right, m, params) + fluxes.surface_noncons(
        u_last, outer_right, m, params
    )
    return left, right


def direct_line_rates(U, outer_left, outer_right, op: SbpOperator1D, m, jac,
                      params: EquationParams, volume: TwoPointFlux):
    """Nodal rates of a batch of 1D lines from the split-form evaluation."""
    pair_cons, sym_m, sym_g, loc_m, loc_g = line_pair_factors(U, m, params, volume)
    two_point = (
        pair_cons
        + loc_m[..., :, None, :] * sym_m[..., :, :, None]
        + loc_g[..., :, None, :] * sym_g[..., :, :, None]
    )
    vol = np.einsum("lm,...lmc->...lc", op.S, two_point)
    left, right = line_surface_terms(U, outer_left, outer_right, m, params)
    rates = -vol
    rates[..., 0, :] += left
    rates[..., -1, :] -= right
    rates /= jac * op.weights[:, None]
    return rates


def compute_rhs_direct(field, op: SbpOperator1D, mesh: Mesh2D, params: EquationParams,
                       volume: TwoPointFlux | None = None):
    """Time derivative of the full field by the direct split-form evaluation."""
    if volume is None:
        volume = fluxes.get_volume_flux("central")
    physics.check_admissible(field, params, where="(rhs input)")
    rates = np.zeros_like(field)
    jac = mesh.metric.J
    for axis in (0, 1):
        U = lines_view(field, axis)
        outer_left, outer_right = gather_interface_traces(field, mesh, axis)
        m = mesh.axis_metric(axis)
        rates += from_lines(
            direct_line_rates(U, outer_left, outer_right, op, m, jac, params, volume), axis
        )
    return rates
