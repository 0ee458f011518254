"""GLM-MHD state algebra.

States are numpy arrays whose trailing axis holds the nine conserved
variables (rho, rho*v1..v3, rho*E, B1..B3, psi); a single state is a
shape-(9,) vector.  Primitive arrays use the same layout with
(rho, v1..v3, p, B1..B3, psi).  All functions broadcast over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RHO, MX, MY, MZ, ENER, BX, BY, BZ, PSI = range(9)
MOM = slice(1, 4)
MAG = slice(5, 8)
NVARS = 9

# primitive layout
VEL = slice(1, 4)
PRES = 4


class AdmissibilityError(ValueError):
    """A state with non-positive density or pressure was encountered."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


@dataclass(frozen=True)
class EquationParams:
    """Gas and divergence-cleaning parameters."""

    gamma: float = 5.0 / 3.0
    mu0: float = 1.0
    c_h: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if not self.mu0 > 0.0:
            raise ValueError("mu0 must be positive")
        if self.c_h < 0.0:
            raise ValueError("c_h must be non-negative")


def velocity(u: np.ndarray) -> np.ndarray:
    return u[..., MOM] / u[..., RHO, None]


def pressure(u: np.ndarray, params: EquationParams) -> np.ndarray:
    """Thermal pressure from the calorically-perfect closure (no clamping)."""
    kinetic = 0.5 * np.sum(u[..., MOM] ** 2, axis=-1) / u[..., RHO]
    magnetic = 0.5 * np.sum(u[..., MAG] ** 2, axis=-1) / params.mu0
    cleaning = 0.5 * u[..., PSI] ** 2 / params.mu0
    return (params.gamma - 1.0) * (u[..., ENER] - kinetic - magnetic - cleaning)


def check_admissible(u: np.ndarray, params: EquationParams, where: str = ""):
    """Raise AdmissibilityError when any node has rho <= 0 or p <= 0."""
    rho = u[..., RHO]
    bad_rho = rho <= 0.0
    if np.any(bad_rho):
        idx = np.argwhere(bad_rho)[0]
        raise AdmissibilityError(
            f"non-positive density {rho[tuple(idx)]:.6e} at node {tuple(idx)} {where}",
            where=tuple(idx),
        )
    p = pressure(u, params)
    bad_p = p <= 0.0
    if np.any(bad_p):
        idx = np.argwhere(bad_p)[0]
        raise AdmissibilityError(
            f"non-positive pressure {p[tuple(idx)]:.6e} at node {tuple(idx)} {where}",
            where=tuple(idx),
        )


def prim_to_cons(prim: np.ndarray, params: EquationParams) -> np.ndarray:
    rho = prim[..., RHO]
    v = prim[..., VEL]
    p = prim[..., PRES]
    b = prim[..., MAG]
    psi = prim[..., PSI]
    u = np.empty_like(prim)
    u[..., RHO] = rho
    u[..., MOM] = rho[..., None] * v
    u[..., ENER] = (
        p / (params.gamma - 1.0)
        + 0.5 * rho * np.sum(v**2, axis=-1)
        + 0.5 * np.sum(b**2, axis=-1) / params.mu0
        + 0.5 * psi**2 / params.mu0
    )
    u[..., MAG] = b
    u[..., PSI] = psi
    return u


def cons_to_prim(u: np.ndarray, params: EquationParams) -> np.ndarray:
    p = pressure(u, params)
    if np.any(p <= 0.0):
        idx = np.argwhere(p <= 0.0)[0]
        raise AdmissibilityError(
            f"non-positive pressure {p[tuple(idx)]:.6e} at node {tuple(idx)}",
            where=tuple(idx),
        )
    prim = np.empty_like(u)
    prim[..., RHO] = u[..., RHO]
    prim[..., VEL] = velocity(u)
    prim[..., PRES] = p
    prim[..., MAG] = u[..., MAG]
    prim[..., PSI] = u[..., PSI]
    return prim


def _euler_flux(u, d, params):
    rho = u[..., RHO]
    v = velocity(u)
    p = pressure(u, params)
    vd = v[..., d]
    f = np.zeros_like(u)
    f[..., RHO] = rho * vd
    f[..., MOM] = rho[..., None] * v * vd[..., None]
    f[..., 1 + d] += p
    f[..., ENER] = vd * (
        0.5 * rho * np.sum(v**2, axis=-1) + params.gamma * p / (params.gamma - 1.0)
    )
    return f


def _mhd_flux(u, d, params):
    v = velocity(u)
    b = u[..., MAG]
    vd = v[..., d]
    bd = b[..., d]
    bsq = np.sum(b**2, axis=-1)
    vdotb = np.sum(v * b, axis=-1)
    f = np.zeros_like(u)
    f[..., 1 + d] = 0.5 * bsq / params.mu0
    f[..., MOM] -= bd[..., None] * b / params.mu0
    f[..., ENER] = (vd * bsq - bd * vdotb) / params.mu0
    f[..., MAG] = vd[..., None] * b - bd[..., None] * v
    return f


def _glm_flux(u, d, params):
    b = u[..., MAG]
    psi = u[..., PSI]
    f = np.zeros_like(u)
    f[..., ENER] = params.c_h * psi * b[..., d] / params.mu0
    f[..., 5 + d] = params.c_h * psi
    f[..., PSI] = params.c_h * b[..., d]
    return f


def advective_flux(u: np.ndarray, d: int, params: EquationParams) -> np.ndarray:
    """Column d of the advective flux: Euler + ideal-MHD + cleaning blocks."""
    return _euler_flux(u, d, params) + _mhd_flux(u, d, params) + _glm_flux(u, d, params)


def flux_dot_metric(u: np.ndarray, m: np.ndarray, params: EquationParams) -> np.ndarray:
    """Advective flux contracted with a constant metric vector m (monolithic form)."""
    m = np.asarray(m, dtype=float)
    rho = u[..., RHO]
    v = velocity(u)
    b = u[..., MAG]
    psi = u[..., PSI]
    p = pressure(u, params)
    vm = v @ m
    bm = b @ m
    bsq = np.sum(b**2, axis=-1)
    vdotb = np.sum(v * b, axis=-1)
    f = np.empty_like(u)
    f[..., RHO] = rho * vm
    f[..., MOM] = (
        rho[..., None] * v * vm[..., None]
        + (p + 0.5 * bsq / params.mu0)[..., None] * m
        - bm[..., None] * b / params.mu0
    )
    f[..., ENER] = (
        vm * (0.5 * rho * np.sum(v**2, axis=-1) + params.gamma * p / (params.gamma - 1.0))
        + (vm * bsq - bm * vdotb) / params.mu0
        + params.c_h * psi * bm / params.mu0
    )
    f[..., MAG] = vm[..., None] * b - bm[..., None] * v + (params.c_h * psi)[..., None] * m
    f[..., PSI] = params.c_h * bm
    return f


def powell_phi(u: np.ndarray, params: EquationParams) -> np.ndarray:
    """Local factor of the Godunov-Powell term: (0, B/mu0, v.B/mu0, v, 0)."""
    v = velocity(u)
    b = u[..., MAG]
    phi = np.zeros_like(u)
    phi[..., MOM] = b / params.mu0
    phi[..., ENER] = np.sum(v * b, axis=-1) / params.mu0
    phi[..., MAG] = v
    return phi


def glm_phi(u: np.ndarray, d: int, params: EquationParams) -> np.ndarray:
    """Direction-d factor of the Galilean cleaning term."""
    v = velocity(u)
    psi = u[..., PSI]
    phi = np.zeros_like(u)
    phi[..., ENER] = v[..., d] * psi / params.mu0
    phi[..., PSI] = v[..., d] / params.mu0
    return phi


def glm_phi_dot_metric(u: np.ndarray, m: np.ndarray, params: EquationParams) -> np.ndarray:
    """Cleaning-term block vector contracted with a constant metric vector."""
    m = np.asarray(m, dtype=float)
    vm = velocity(u) @ m
    psi = u[..., PSI]
    phi = np.zeros_like(u)
    phi[..., ENER] = vm * psi / params.mu0
    phi[..., PSI] = vm / params.mu0
    return phi


def specific_entropy(u: np.ndarray, params: EquationParams) -> np.ndarray:
    """s = ln(p rho^-gamma)."""
    rho = u[..., RHO]
    p = pressure(u, params)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise AdmissibilityError("specific entropy of an inadmissible state")
    return np.log(p * rho**-params.gamma)


def modified_entropy(u: np.ndarray, params: EquationParams) -> np.ndarray:
    """theta = e rho^(1-gamma) with e the specific internal energy."""
    rho = u[..., RHO]
    p = pressure(u, params)
    if np.any(rho <= 0.0):
        raise AdmissibilityError("modified entropy of a state with rho <= 0")
    e = p / ((params.gamma - 1.0) * rho)
    return e * rho ** (1.0 - params.gamma)


def modified_entropy_unchecked(u: np.ndarray, params: EquationParams) -> np.ndarray:
    """Limiter-internal theta: returns -inf-like sentinel where rho <= 0."""
    rho = u[..., RHO]
    p = pressure(u, params)
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = p * rho**-params.gamma / (params.gamma - 1.0)
    return np.where(rho > 0.0, theta, -1e300)


def grad_modified_entropy(u: np.ndarray, params: EquationParams) -> np.ndarray:
    """d theta / d u for the Newton line search (admissible states only)."""
    g = params.gamma
    rho = u[..., RHO]
    v = velocity(u)
    p = pressure(u, params)
    scale = rho**-g / (g - 1.0)
    grad = np.empty_like(u)
    grad[..., RHO] = scale * ((g - 1.0) * 0.5 * np.sum(v**2, axis=-1)) - (
        g * p * rho ** (-g - 1.0) / (g - 1.0)
    )
    grad[..., MOM] = -scale[..., None] * (g - 1.0) * v
    grad[..., ENER] = scale * (g - 1.0)
    grad[..., MAG] = -scale[..., None] * (g - 1.0) * u[..., MAG] / params.mu0
    grad[..., PSI] = -scale * (g - 1.0) * u[..., PSI] / params.mu0
    return grad


def _as_unit_direction(direction) -> np.ndarray:
    if np.isscalar(direction) or (isinstance(direction, (int, np.integer))):
        n = np.zeros(3)
        n[int(direction)] = 1.0
        return n
    n = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValueError("direction vector must have positive magnitude")
    return n / norm


def fast_magnetosonic_speed(u: np.ndarray, direction, params: EquationParams) -> np.ndarray:
    """Largest magneto-acoustic characteristic speed along a unit direction."""
    n = _as_unit_direction(direction)
    rho = u[..., RHO]
    p = pressure(u, params)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise AdmissibilityError("wave speed of an inadmissible state")
    a2 = params.gamma * p / rho
    b2 = np.sum(u[..., MAG] ** 2, axis=-1) / (params.mu0 * rho)
    bn2 = (u[..., MAG] @ n) ** 2 / (params.mu0 * rho)
    total = a2 + b2
    return np.sqrt(0.5 * (total + np.sqrt(np.maximum(total**2 - 4.0 * a2 * bn2, 0.0))))


def max_wave_speed(uL: np.ndarray, uR: np.ndarray, direction, params: EquationParams) -> np.ndarray:
    """Rusanov dissipation speed: fast magnetosonic plus |v.n|, and c_h."""
    n = _as_unit_direction(direction)
    lam_l = np.abs(velocity(uL) @ n) + fast_magnetosonic_speed(uL, n, params)
    lam_r = np.abs(velocity(uR) @ n) + fast_magnetosonic_speed(uR, n, params)
    return np.maximum(np.maximum(lam_l, lam_r), params.c_h)
