"""Right-hand sides of the transformed momentum and free-surface equations.

The pressure split p = p_D + rho g (eta - z) is built in analytically: the
vertical static gradient cancels gravity exactly, so the only static term
evaluated numerically is the horizontal slope contribution -g d(eta)/dx.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Bathymetry, SigmaGeometry, sigma_laplacian, w_sigma
from .spectral import Grid2D, cheb_diff, fourier_diff

__all__ = [
    "PhysicalConstants",
    "ModelMode",
    "FlowState",
    "surface_trace",
    "momentum_rhs",
    "pressure_free_rhs",
    "pressure_gradient_accel",
    "surface_rhs",
    "bottom_bc_apply",
]


@dataclass(frozen=True)
class PhysicalConstants:
    g: float = 9.81
    rho: float = 1000.0
    nu: float = 1e-6

    def __post_init__(self):
        if self.g <= 0 or self.rho <= 0 or self.nu < 0:
            raise ValueError("require g > 0, rho > 0, nu >= 0")


class ModelMode(enum.Enum):
    NONLINEAR = "nonlinear"
    LINEARIZED = "linearized"


@dataclass(frozen=True)
class FlowState:
    """Velocities, dynamic pressure and surface elevation at one time level."""

    grid: Grid2D
    u: np.ndarray
    w: np.ndarray
    p_d: np.ndarray
    eta: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("u", "w", "p_d"):
            arr = getattr(self, name)
            if arr.shape != self.grid.shape:
                raise ValueError(f"{name} shape {arr.shape} != grid {self.grid.shape}")
        if self.eta.shape != (self.grid.fourier.npoints,):
            raise ValueError("eta does not match the horizontal grid")

    @staticmethod
    def rest(grid: Grid2D, t: float = 0.0) -> "FlowState":
        z2 = np.zeros(grid.shape)
        return FlowState(grid, z2, z2.copy(), z2.copy(),
                         np.zeros(grid.fourier.npoints), t)

    def with_fields(self, **kwargs) -> "FlowState":
        return replace(self, **kwargs)


def surface_trace(f: np.ndarray) -> np.ndarray:
    """Value on the free-surface collocation row (sigma = 1)."""
    return f[:, 0]


def bed_trace(f: np.ndarray) -> np.ndarray:
    return f[:, -1]


def pressure_free_rhs(state: FlowState, geom: SigmaGeometry,
                      consts: PhysicalConstants, mode: ModelMode):
    """Momentum forcing without the dynamic-pressure gradient.

    Nonlinear mode: -(u d/dchi + w_sigma d/dsigma)(u, w) - (g eta_x, 0)
    + nu Laplacian(u, w).  Linearized mode drops advection; the caller is
    expected to pass rest-geometry metrics.
    """
    grid = state.grid
    eta_x = fourier_diff(state.eta, grid.fourier, 1)
    fx = -consts.g * eta_x[:, None] + consts.nu * sigma_laplacian(state.u, geom)
    fz = consts.nu * sigma_laplacian(state.w, geom)
    if mode is ModelMode.NONLINEAR:
        ws = w_sigma(state.u, state.w, geom)
        u_chi = fourier_diff(state.u, grid.fourier, 1, axis=0)
        u_sig = cheb_diff(state.u, grid.cheb, 1, axis=1)
        w_chi = fourier_diff(state.w, grid.fourier, 1, axis=0)
        w_sig = cheb_diff(state.w, grid.cheb, 1, axis=1)
        fx = fx - (state.u * u_chi + ws * u_sig)
        fz = fz - (state.u * w_chi + ws * w_sig)
    return fx, fz


def pressure_gradient_accel(p_d: np.ndarray, geom: SigmaGeometry, rho: float):
    """Acceleration -(1/rho) grad_sigma p_D."""
    grid = geom.grid
    p_chi = fourier_diff(p_d, grid.fourier, 1, axis=0)
    p_sig = cheb_diff(p_d, grid.cheb, 1, axis=1)
    ax = -(p_chi + geom.dsdx * p_sig) / rho
    az = -(geom.dsdz[:, None] * p_sig) / rho
    return ax, az


def momentum_rhs(state: FlowState, geom: SigmaGeometry,
                 consts: PhysicalConstants, mode: ModelMode):
    """Full (du/dt, dw/dt) including the dynamic-pressure gradient."""
    fx, fz = pressure_free_rhs(state, geom, consts, mode)
    ax, az = pressure_gradient_accel(state.p_d, geom, consts.rho)
    return fx + ax, fz + az


def surface_rhs(state: FlowState, mode: ModelMode) -> np.ndarray:
    """d(eta)/dt from the kinematic free-surface condition."""
    w_s = surface_trace(state.w)
    if mode is ModelMode.LINEARIZED:
        return w_s.copy()
    eta_x = fourier_diff(state.eta, state.grid.fourier, 1)
    return w_s - surface_trace(state.u) * eta_x


def bottom_bc_apply(state: FlowState, bathy: Bathymetry, kind: str = "impermeable") -> FlowState:
    """Constrain the bed collocation row.

    impermeable: n . u = 0, i.e. w = -u dh/dx along the bed; no-slip: u = w = 0.
    """
    u = state.u.copy()
    w = state.w.copy()
    if kind == "impermeable":
        w[:, -1] = -u[:, -1] * bathy.dh_dx
    elif kind == "no-slip":
        u[:, -1] = 0.0
        w[:, -1] = 0.0
    else:
        raise ValueError(f"unknown bottom condition {kind!r}")
    return state.with_fields(u=u, w=w)
