"""Blending-coefficient selection and aggregation.

Two selection strategies are provided: an a-priori smoothness sensor
(a filtered, grid-aware second difference of rho*p) and an a-posteriori
invariant-domain correction enforcing local density bounds and a minimum
principle on the modified specific entropy against the first-order
finite-volume stage update.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import physics
from .fluxdiff import RhsSets, assemble_rates, compute_axis_sets, uniform_interface_alpha
from .mesh import Mesh2D, from_subcell_grid, subcell_grid
from .operators import SbpOperator1D
from .physics import RHO, EquationParams

log = logging.getLogger(__name__)

ELEMENT_WISE = "element"
SUBCELL_WISE = "subcell"
BOUND_SLACK = 1e-9


@dataclass
class BlendField:
    """Per-node blending coefficients plus their per-interface aggregation."""

    node_alpha: np.ndarray  # (nx, ny, n, n) in [0, 1]
    mode: str
    iface_x: np.ndarray | None = None  # (nx, ny, n, n+1), line layout
    iface_y: np.ndarray | None = None


def aggregate(blend: BlendField, mode: str | None = None) -> BlendField:
    """Fill the per-interface coefficients from the nodal ones.

    Element-wise: every interface of an element takes the element maximum.
    Subcell-wise: each interface takes the maximum of its two adjacent
    nodes, crossing element boundaries to the neighbor's facing node.
    """
    if mode is None:
        mode = blend.mode
    a = blend.node_alpha
    nx, ny, n, _ = a.shape
    if mode == ELEMENT_WISE:
        elem = a.max(axis=(2, 3))
        iface = np.broadcast_to(elem[:, :, None, None], (nx, ny, n, n + 1)).copy()
        blend.iface_x = iface
        blend.iface_y = iface.copy()
    elif mode == SUBCELL_WISE:
        ax = np.swapaxes(a, 2, 3)  # line layout along x: (nx, ny, j, i)
        ix = np.empty((nx, ny, n, n + 1))
        ix[..., 1:n] = np.maximum(ax[..., :-1], ax[..., 1:])
        ix[..., 0] = np.maximum(np.roll(ax[..., -1], 1, axis=0), ax[..., 0])
        ix[..., n] = np.maximum(ax[..., -1], np.roll(ax[..., 0], -1, axis=0))
        ay = a  # line layout along y
        iy = np.empty((nx, ny, n, n + 1))
        iy[..., 1:n] = np.maximum(ay[..., :-1], ay[..., 1:])
        iy[..., 0] = np.maximum(np.roll(ay[..., -1], 1, axis=1), ay[..., 0])
        iy[..., n] = np.maximum(ay[..., -1], np.roll(ay[..., 0], -1, axis=1))
        blend.iface_x = ix
        blend.iface_y = iy
    else:
        raise ValueError(f"unknown blend mode '{mode}'")
    blend.mode = mode
    return blend


def effective_node_alpha(blend: BlendField) -> np.ndarray:
    """Nodal coefficients as actually applied: element mode broadcasts the
    element maximum to all of its nodes."""
    if blend.mode == ELEMENT_WISE:
        nx, ny, n, _ = blend.node_alpha.shape
        elem = blend.node_alpha.max(axis=(2, 3))
        return np.broadcast_to(elem[:, :, None, None], (nx, ny, n, n)).copy()
    return blend.node_alpha


def _loehner_ratio(u_minus, u_center, u_plus, d_minus, d_plus, eps):
    """Grid-aware filtered second-difference ratio (numerator, denominator).

    The numerator is evaluated in difference form so constant data cancels
    exactly instead of leaving roundoff residue.
    """
    num = np.abs(d_minus * (u_plus - u_center) - d_plus * (u_center - u_minus))
    den = (
        d_minus * np.abs(u_plus - u_center)
        + d_plus * np.abs(u_center - u_minus)
        + eps
        * (
            d_minus * np.abs(u_plus)
            + (d_minus + d_plus) * np.abs(u_center)
            + d_plus * np.abs(u_minus)
        )
    )
    return num, den


def loehner_alpha(field, mesh: Mesh2D, op: SbpOperator1D, params: EquationParams,
                  eps: float = 0.2) -> BlendField:
    """A-priori smoothness sensor on rho*p, evaluated per axis at the
    interior nodes of every element; boundary nodes get zero."""
    ind = field[..., RHO] * physics.pressure(field, params)  # (nx, ny, n, n)
    n = op.n_nodes
    spacing = np.diff(op.nodes)
    alpha = np.zeros_like(ind)
    if n >= 3:
        d_minus = spacing[:-1]
        d_plus = spacing[1:]
        for axis_nodes, which in ((3, "y"), (2, "x")):
            u = np.moveaxis(ind, axis_nodes, -1)  # (..., n) along the axis
            num, den = _loehner_ratio(
                u[..., :-2], u[..., 1:-1], u[..., 2:], d_minus, d_plus, eps
            )
            with np.errstate(invalid="ignore", divide="ignore"):
                ratio = np.where(den > 0.0, num / den, 0.0)
            contrib = np.zeros_like(u)
            contrib[..., 1:-1] = ratio
            alpha = np.maximum(alpha, np.moveaxis(contrib, -1, axis_nodes))
    np.clip(alpha, 0.0, 1.0, out=alpha)
    return BlendField(node_alpha=alpha, mode=SUBCELL_WISE)


@dataclass
class IdpBounds:
    rho_min: np.ndarray
    rho_max: np.ndarray
    theta_min: np.ndarray | None = None


def _neighborhood_extrema(grid: np.ndarray, reduce_fn):
    """Extremum over the node and its four axis neighbors (periodic wrap)."""
    out = grid.copy()
    for axis in (0, 1):
        for shift in (-1, 1):
            out = reduce_fn(out, np.roll(grid, shift, axis=axis))
    return out


def idp_bounds(u_fv, mesh: Mesh2D, params: EquationParams,
               with_entropy: bool = True) -> IdpBounds:
    """Local bounds from the finite-volume stage update.

    The stencil is the node itself plus its immediate subcell neighbors
    along each axis, crossing element interfaces to the facing node.
    """
    nx, ny, n = u_fv.shape[0], u_fv.shape[1], u_fv.shape[2]
    rho = subcell_grid(u_fv[..., RHO, None], nx, ny, n)[..., 0]
    rho_min = from_subcell_grid(_neighborhood_extrema(rho, np.minimum), nx, ny, n)
    rho_max = from_subcell_grid(_neighborhood_extrema(rho, np.maximum), nx, ny, n)
    theta_min = None
    if with_entropy:
        theta = physics.modified_entropy_unchecked(u_fv, params)
        theta_grid = subcell_grid(theta[..., None], nx, ny, n)[..., 0]
        theta_min = from_subcell_grid(
            _neighborhood_extrema(theta_grid, np.minimum), nx, ny, n
        )
    return IdpBounds(rho_min=rho_min, rho_max=rho_max, theta_min=theta_min)


def zalesak_density_alpha(u_ho, u_fv, bounds: IdpBounds):
    """Per-node coefficient bringing the blended density back to the violated
    bound by linear interpolation toward the finite-volume update.

    Returns (alpha_raw, fired): alpha_raw is zero where the candidate
    density already lies inside [rho_min, rho_max].
    """
    rho_ho = u_ho[..., RHO]
    rho_fv = u_fv[..., RHO]
    viol_hi = rho_ho > bounds.rho_max
    viol_lo = rho_ho < bounds.rho_min
    fired = viol_hi | viol_lo
    bound = np.where(viol_hi, bounds.rho_max, bounds.rho_min)
    denom = rho_ho - rho_fv
    with np.errstate(invalid="ignore", divide="ignore"):
        alpha = 1.0 - (bound - rho_fv) / denom
    degenerate = fired & (denom == 0.0)
    if np.any(degenerate):
        log.warning("degenerate density limiting at %d nodes; forcing alpha = 1",
                    int(np.count_nonzero(degenerate)))
        alpha = np.where(degenerate, 1.0, alpha)
    alpha = np.where(fired, np.clip(alpha, 0.0, 1.0), 0.0)
    return alpha, fired


def entropy_newton_alpha(u_ho, u_fv, theta_min, params: EquationParams,
                         tol_alpha: float = 1e-12, max_iter: int = 10):
    """Smallest alpha in [0, 1] with theta((1-a) u_ho + a u_fv) >= theta_min.

    Newton iteration with a bisection safeguard keeping a bracket
    [a_lo: constraint violated, a_hi: satisfied].  Flat input arrays.
    """
    u_ho = np.atleast_2d(u_ho)
    u_fv = np.atleast_2d(u_fv)
    theta_min = np.atleast_1d(theta_min)
    n = theta_min.shape[0]

    theta0 = physics.modified_entropy_unchecked(u_ho, params)
    done = theta0 >= theta_min
    alpha = np.zeros(n)

    theta_fv = physics.modified_entropy_unchecked(u_fv, params)
    bad = (~done) & (theta_fv < theta_min - 1e-13)
    if np.any(bad):
        log.warning("entropy bound above the finite-volume value at %d nodes",
                    int(np.count_nonzero(bad)))
        alpha[bad] = 1.0
        done |= bad

    a_lo = np.zeros(n)
    a_hi = np.ones(n)
    a = np.full(n, 0.5)
    active = ~done
    du = u_fv - u_ho
    for _ in range(max_iter):
        if not np.any(active):
            break
        u_a = u_ho + a[:, None] * du
        g = physics.modified_entropy_unchecked(u_a, params) - theta_min
        sat = g >= 0.0
        a_hi = np.where(active & sat, a, a_hi)
        a_lo = np.where(active & ~sat, a, a_lo)
        # Newton where the probed state is usable, bisection otherwise
        rho_ok = u_a[..., RHO] > 0.0
        u_safe = np.where(rho_ok[..., None], u_a, u_fv)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            dg = np.sum(physics.grad_modified_entropy(u_safe, params) * du, axis=-1)
            newton = a - g / dg
        use_newton = rho_ok & np.isfinite(newton) & (newton > a_lo) & (newton < a_hi)
        a = np.where(use_newton, newton, 0.5 * (a_lo + a_hi))
        converged = (a_hi - a_lo) <= tol_alpha
        alpha = np.where(active & converged, a_hi, alpha)
        active = active & ~converged
    if np.any(active):
        log.info("entropy line search hit max_iter at %d nodes; keeping safe side",
                 int(np.count_nonzero(active)))
        alpha = np.where(active, a_hi, alpha)
    return np.clip(alpha, 0.0, 1.0)


def bound_violations(u, bounds: IdpBounds, params: EquationParams,
                     slack: float = BOUND_SLACK):
    """Mask of nodes outside the density bounds or below the entropy bound."""
    rho = u[..., RHO]
    viol = (rho < bounds.rho_min - slack) | (rho > bounds.rho_max + slack)
    if bounds.theta_min is not None:
        theta = physics.modified_entropy_unchecked(u, params)
        viol |= theta < bounds.theta_min - slack
    return viol


def max_bound_violation(u, bounds: IdpBounds, params: EquationParams) -> float:
    rho = u[..., RHO]
    v = np.maximum(bounds.rho_min - rho, rho - bounds.rho_max)
    worst = float(np.max(v))
    if bounds.theta_min is not None:
        theta = physics.modified_entropy_unchecked(u, params)
        worst = max(worst, float(np.max(bounds.theta_min - theta)))
    return worst


# --- stage controllers -----------------------------------------------------
#
# A limiter advances one Runge-Kutta stage: it owns the alpha selection and,
# for the a-posteriori variant, the bounds-enforcing correction loop.  The
# stage update is affine in the staggered fluxes, so the flux sets are
# computed once per stage and re-blended as the coefficients rise.


@dataclass
class StageContext:
    op: SbpOperator1D
    mesh: Mesh2D
    params: EquationParams
    volume: object = None


class NoLimiter:
    """Pure high-order update (alpha = 0 everywhere)."""

    mode = SUBCELL_WISE

    def advance_stage(self, base, u_prev, cdt, ctx: StageContext):
        sets = compute_axis_sets(u_prev, ctx.op, ctx.mesh, ctx.params, ctx.volume)
        ix, iy = uniform_interface_alpha(ctx.mesh, ctx.op, 0.0)
        u_next = base + cdt * assemble_rates(sets, ix, iy, ctx.op, ctx.mesh)
        alpha = np.zeros(u_prev.shape[:4])
        return u_next, alpha


class FixedFvLimiter:
    """Pure first-order finite-volume update (alpha = 1 everywhere)."""

    mode = SUBCELL_WISE

    def advance_stage(self, base, u_prev, cdt, ctx: StageContext):
        sets = compute_axis_sets(u_prev, ctx.op, ctx.mesh, ctx.params, ctx.volume)
        ix, iy = uniform_interface_alpha(ctx.mesh, ctx.op, 1.0)
        u_next = base + cdt * assemble_rates(sets, ix, iy, ctx.op, ctx.mesh)
        alpha = np.ones(u_prev.shape[:4])
        return u_next, alpha


class LoehnerLimiter:
    """A-priori blending from the smoothness sensor."""

    def __init__(self, mode: str = SUBCELL_WISE, eps: float = 0.2):
        self.mode = mode
        self.eps = eps

    def advance_stage(self, base, u_prev, cdt, ctx: StageContext):
        blend = loehner_alpha(u_prev, ctx.mesh, ctx.op, ctx.params, eps=self.eps)
        blend.mode = self.mode
        aggregate(blend)
        sets = compute_axis_sets(u_prev, ctx.op, ctx.mesh, ctx.params, ctx.volume)
        u_next = base + cdt * assemble_rates(sets, blend.iface_x, blend.iface_y,
                                             ctx.op, ctx.mesh)
        return u_next, effective_node_alpha(blend)


class IdpLimiter:
    """A-posteriori invariant-domain correction at every stage.

    Raises nodal coefficients through the density limiter (and, where that
    fired, the entropy line search) against bounds taken from the
    finite-volume stage update, re-blending until the bounds hold.  After
    ``max_passes`` sweeps the still-violating nodes escalate monotonically
    to alpha = 1, whose update satisfies the bounds by construction.
    """

    def __init__(self, mode: str = SUBCELL_WISE, density: bool = True,
                 entropy: bool = True, max_passes: int = 3, audit: list | None = None):
        if not density:
            raise ValueError("the a-posteriori limiter requires the density bounds")
        self.mode = mode
        self.entropy = entropy
        self.max_passes = max_passes
        self.audit = audit

    def advance_stage(self, base, u_prev, cdt, ctx: StageContext):
        sets = compute_axis_sets(u_prev, ctx.op, ctx.mesh, ctx.params, ctx.volume)
        ones_x, ones_y = uniform_interface_alpha(ctx.mesh, ctx.op, 1.0)
        u_fv = base + cdt * assemble_rates(sets, ones_x, ones_y, ctx.op, ctx.mesh)
        bounds = idp_bounds(u_fv, ctx.mesh, ctx.params, with_entropy=self.entropy)

        node_alpha = np.zeros(u_prev.shape[:4])
        blend = BlendField(node_alpha=node_alpha, mode=self.mode)
        u_cand = self._reblend(sets, blend, base, cdt, ctx)

        for _ in range(self.max_passes):
            if not np.any(bound_violations(u_cand, bounds, ctx.params)):
                break
            alpha_z, fired = zalesak_density_alpha(u_cand, u_fv, bounds)
            node_alpha = np.maximum(node_alpha, alpha_z)
            if self.entropy and np.any(fired):
                alpha_e = entropy_newton_alpha(
                    u_cand[fired], u_fv[fired], bounds.theta_min[fired], ctx.params
                )
                node_alpha[fired] = np.maximum(node_alpha[fired], alpha_e)
            blend.node_alpha = node_alpha
            u_cand = self._reblend(sets, blend, base, cdt, ctx)

        # monotone escalation: force violating nodes onto the FV update
        while True:
            viol = bound_violations(u_cand, bounds, ctx.params)
            if not np.any(viol):
                break
            if np.all(node_alpha >= 1.0):
                u_cand = u_fv
                break
            node_alpha = np.maximum(node_alpha, np.where(viol, 1.0, 0.0))
            blend.node_alpha = node_alpha
            u_cand = self._reblend(sets, blend, base, cdt, ctx)

        if self.audit is not None:
            self.audit.append(max_bound_violation(u_cand, bounds, ctx.params))
        return u_cand, effective_node_alpha(blend)

    def _reblend(self, sets: RhsSets, blend: BlendField, base, cdt, ctx: StageContext):
        aggregate(blend)
        return base + cdt * assemble_rates(sets, blend.iface_x, blend.iface_y,
                                           ctx.op, ctx.mesh)


def make_limiter(kind: str, mode: str = SUBCELL_WISE, loehner_eps: float = 0.2,
                 idp_density: bool = True, idp_entropy: bool = True,
                 audit: list | None = None):
    """Factory for the configuration surface: none | loehner | idp | fv."""
    if kind == "none":
        return NoLimiter()
    if kind == "fv":
        return FixedFvLimiter()
    if kind == "loehner":
        return LoehnerLimiter(mode=mode, eps=loehner_eps)
    if kind == "idp":
        return IdpLimiter(mode=mode, density=idp_density, entropy=idp_entropy, audit=audit)
    raise ValueError(f"unknown limiter '{kind}'")
