"""Two-point volume fluxes, local x symmetric non-conservative splits, and
interface (surface) fluxes.

Volume fluxes are exchangeable behind a small protocol: ``pair`` evaluates
the two-point flux between two state arrays, ``pair_tensor`` evaluates it
between all node pairs of a batch of 1D lines.  The default is the central
average; an entropy-conservative flux can be registered under the name
"ec" and selected through configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import physics
from .physics import EquationParams


class VolumeFluxUnavailable(RuntimeError):
    """Requested volume flux has no registered implementation."""


class TwoPointFlux:
    """Base class: symmetric, consistent two-point volume flux."""

    name = "base"

    def pair(self, u_a, u_b, m, params):  # pragma: no cover - interface
        raise NotImplementedError

    def pair_tensor(self, line_states, m, params):
        """All-pairs evaluation along the second-to-last axis."""
        u_a = line_states[..., :, None, :]
        u_b = line_states[..., None, :, :]
        return self.pair(u_a, u_b, m, params)


class CentralFlux(TwoPointFlux):
    """Arithmetic average of the metric-projected advective fluxes."""

    name = "central"

    def pair(self, u_a, u_b, m, params):
        return 0.5 * (
            physics.flux_dot_metric(u_a, m, params) + physics.flux_dot_metric(u_b, m, params)
        )

    def pair_tensor(self, line_states, m, params):
        g = physics.flux_dot_metric(line_states, m, params)
        return 0.5 * (g[..., :, None, :] + g[..., None, :, :])


_VOLUME_FLUXES: dict[str, TwoPointFlux] = {"central": CentralFlux()}


def register_volume_flux(name: str, flux: TwoPointFlux):
    _VOLUME_FLUXES[name] = flux


def unregister_volume_flux(name: str):
    _VOLUME_FLUXES.pop(name, None)


def get_volume_flux(name: str) -> TwoPointFlux:
    try:
        return _VOLUME_FLUXES[name]
    except KeyError:
        raise VolumeFluxUnavailable(
            f"volume flux '{name}' unavailable; registered: {sorted(_VOLUME_FLUXES)}"
        ) from None


def central_volume_flux(uL, uR, dir_metric, params: EquationParams):
    return _VOLUME_FLUXES["central"].pair(uL, uR, dir_metric, params)


def ec_volume_flux(uL, uR, dir_metric, params: EquationParams):
    """Entropy-conservative slot; raises VolumeFluxUnavailable until registered."""
    return get_volume_flux("ec").pair(uL, uR, dir_metric, params)


def check_volume_flux_contract(
    flux: TwoPointFlux,
    params: EquationParams,
    rng: np.random.Generator,
    n_pairs: int = 100,
    entropy_vars=None,
    flux_potential=None,
):
    """Deviation of a volume flux from its contract on random admissible pairs.

    Returns a dict with the max symmetry and consistency violations, plus the
    entropy-conservation contraction residual when the caller supplies the
    entropy-variable map and the flux potential of the entropy pair.
    """
    prim = np.empty((n_pairs, 2, 9))
    prim[..., 0] = rng.uniform(0.5, 2.0, (n_pairs, 2))
    prim[..., 1:4] = rng.uniform(-1.0, 1.0, (n_pairs, 2, 3))
    prim[..., 4] = rng.uniform(0.5, 2.0, (n_pairs, 2))
    prim[..., 5:8] = rng.uniform(-1.0, 1.0, (n_pairs, 2, 3))
    prim[..., 8] = rng.uniform(-0.5, 0.5, (n_pairs, 2))
    u = physics.prim_to_cons(prim, params)
    m = np.array([1.0, 0.0, 0.0])
    f_ab = flux.pair(u[:, 0], u[:, 1], m, params)
    f_ba = flux.pair(u[:, 1], u[:, 0], m, params)
    f_aa = flux.pair(u[:, 0], u[:, 0], m, params)
    report = {
        "symmetry": float(np.max(np.abs(f_ab - f_ba))),
        "consistency": float(
            np.max(np.abs(f_aa - physics.flux_dot_metric(u[:, 0], m, params)))
        ),
    }
    if entropy_vars is not None and flux_potential is not None:
        w_jump = entropy_vars(u[:, 0], params) - entropy_vars(u[:, 1], params)
        psi_jump = flux_potential(u[:, 0], m, params) - flux_potential(u[:, 1], m, params)
        report["entropy_condition"] = float(
            np.max(np.abs(np.sum(w_jump * f_ab, axis=-1) - psi_jump))
        )
    return report


@dataclass(frozen=True)
class NonconsSplit:
    """One non-conservative two-point term factored as local * symmetric."""

    loc: np.ndarray  # (..., 9) node-local factor
    sym: np.ndarray  # (...,) symmetric two-point factor

    def assembled(self) -> np.ndarray:
        return self.loc * self.sym[..., None]


def powell_noncons_split(u_local, other_B, metric_avg, params: EquationParams) -> NonconsSplit:
    """Godunov-Powell split: local phi, symmetric avg(B) . avg(J a)."""
    metric_avg = np.asarray(metric_avg, dtype=float)
    loc = physics.powell_phi(u_local, params)
    sym = 0.5 * (u_local[..., physics.MAG] + other_B) @ metric_avg
    return NonconsSplit(loc=loc, sym=sym)


def glm_noncons_split(u_local, other_psi, metric_local, params: EquationParams) -> NonconsSplit:
    """Cleaning-field split: local phi . (J a)_local, symmetric avg(psi)."""
    loc = physics.glm_phi_dot_metric(u_local, metric_local, params)
    sym = 0.5 * (u_local[..., physics.PSI] + other_psi)
    return NonconsSplit(loc=loc, sym=sym)


def rusanov_surface_flux(u_in, u_out, normal_metric, params: EquationParams):
    """Central flux plus scalar dissipation at the largest signal speed."""
    m = np.asarray(normal_metric, dtype=float)
    norm = np.linalg.norm(m)
    if norm <= 0.0:
        raise ValueError("normal metric must have positive magnitude")
    lam = physics.max_wave_speed(u_in, u_out, m / norm, params)
    central = 0.5 * (
        physics.flux_dot_metric(u_in, m, params) + physics.flux_dot_metric(u_out, m, params)
    )
    return central - 0.5 * norm * lam[..., None] * (u_out - u_in)


def surface_noncons(u_in, u_out, metric, params: EquationParams):
    """Interface non-conservative term: the volume splits evaluated with the
    exterior trace as second argument (local factors from the interior side)."""
    powell = powell_noncons_split(u_in, u_out[..., physics.MAG], metric, params)
    glm = glm_noncons_split(u_in, u_out[..., physics.PSI], metric, params)
    return powell.assembled() + glm.assembled()
