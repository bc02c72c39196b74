"""Geometry of the sigma-transformed computational domain.

The vertical coordinate sigma = (z + h) / d with d = h + eta maps the moving
water column onto the fixed unit interval.  This module evaluates the metric
coefficients of that map nodally and provides the transformed differential
operators (gradient, Laplacian, divergence, transformed vertical velocity)
used by the dynamics and pressure solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ChebyshevGrid, FourierGrid, Grid2D, cheb_diff, fourier_diff

__all__ = [
    "GeometryError",
    "Bathymetry",
    "SurfaceState",
    "SigmaGeometry",
    "compute_geometry",
    "sigma_gradient",
    "sigma_laplacian",
    "sigma_divergence",
    "w_sigma",
]


class GeometryError(RuntimeError):
    """Raised when the water column degenerates (dry node)."""


@dataclass(frozen=True)
class Bathymetry:
    """Still-water depth h(x) > 0 with spectrally consistent derivatives."""

    grid: FourierGrid
    h: np.ndarray
    dh_dx: np.ndarray
    d2h_dx2: np.ndarray

    @staticmethod
    def from_depth(h: np.ndarray, grid: FourierGrid) -> "Bathymetry":
        h = np.asarray(h, dtype=float)
        if h.shape != (grid.npoints,):
            raise ValueError("depth array does not match grid")
        if np.any(h <= 0.0):
            raise GeometryError("still-water depth must be positive everywhere")
        return Bathymetry(grid, h, fourier_diff(h, grid, 1), fourier_diff(h, grid, 2))

    @staticmethod
    def flat(depth: float, grid: FourierGrid) -> "Bathymetry":
        if depth <= 0:
            raise GeometryError("still-water depth must be positive everywhere")
        zero = np.zeros(grid.npoints)
        return Bathymetry(grid, np.full(grid.npoints, float(depth)), zero, zero.copy())


@dataclass(frozen=True)
class SurfaceState:
    """Free-surface elevation eta(x) and its spectral derivatives."""

    grid: FourierGrid
    eta: np.ndarray
    deta_dx: np.ndarray
    d2eta_dx2: np.ndarray

    @staticmethod
    def from_eta(eta: np.ndarray, grid: FourierGrid) -> "SurfaceState":
        eta = np.asarray(eta, dtype=float)
        if eta.shape != (grid.npoints,):
            raise ValueError("surface array does not match grid")
        return SurfaceState(grid, eta, fourier_diff(eta, grid, 1), fourier_diff(eta, grid, 2))


@dataclass(frozen=True)
class SigmaGeometry:
    """Nodal metric coefficients of the sigma transform on a Grid2D.

    ``dsdx`` and ``d2sdx2`` have shape (N+1, M+1); ``d``, ``dsdz`` and the
    time metric prefactor are horizontal-only arrays broadcast over sigma.
    """

    grid: Grid2D
    d: np.ndarray            # water-column height h + eta, shape (N+1,)
    dd_dx: np.ndarray
    dsdz: np.ndarray         # 1/d, shape (N+1,)
    dsdx: np.ndarray         # shape (N+1, M+1)
    d2sdx2: np.ndarray       # shape (N+1, M+1)
    dsdt: np.ndarray         # shape (N+1, M+1)
    dd_dt: np.ndarray        # shape (N+1,)


def compute_geometry(bathy: Bathymetry, surf: SurfaceState,
                     cheb: ChebyshevGrid, dd_dt: np.ndarray | None = None) -> SigmaGeometry:
    """Evaluate all sigma-metric coefficients for one surface snapshot.

    ``dd_dt`` is the rate of change of the water column height (horizontal
    array).  When omitted it is taken as zero; the time stepper passes the
    kinematic surface rate w - u eta_x instead.
    """
    if bathy.grid is not surf.grid and bathy.grid != surf.grid:
        raise ValueError("bathymetry and surface live on different grids")
    d = bathy.h + surf.eta
    if np.any(d <= 0.0):
        raise GeometryError(
            f"dry node: min water-column height {d.min():.3e} m is not positive"
        )
    grid = Grid2D(bathy.grid, cheb)
    sigma = cheb.sigma[None, :]
    inv_d = 1.0 / d
    dd_dx = bathy.dh_dx + surf.deta_dx
    d2d_dx2 = bathy.d2h_dx2 + surf.d2eta_dx2

    dsdx = inv_d[:, None] * (bathy.dh_dx[:, None] - sigma * dd_dx[:, None])
    d2sdx2 = inv_d[:, None] * (
        bathy.d2h_dx2[:, None]
        - sigma * d2d_dx2[:, None]
        - 2.0 * dsdx * dd_dx[:, None]
    )
    if dd_dt is None:
        dd_dt = np.zeros_like(d)
    else:
        dd_dt = np.asarray(dd_dt, dtype=float)
    dsdt = -inv_d[:, None] * sigma * dd_dt[:, None]
    return SigmaGeometry(grid, d, dd_dx, inv_d, dsdx, d2sdx2, dsdt, dd_dt)


def sigma_gradient(f: np.ndarray, g: SigmaGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Physical (x, z) gradient of a field on the computational grid.

    f_x = f_chi + (ds/dx) f_sigma,  f_z = (ds/dz) f_sigma.
    """
    f_sig = cheb_diff(f, g.grid.cheb, 1, axis=1)
    f_x = fourier_diff(f, g.grid.fourier, 1, axis=0) + g.dsdx * f_sig
    f_z = g.dsdz[:, None] * f_sig
    return f_x, f_z


def sigma_laplacian(f: np.ndarray, g: SigmaGeometry) -> np.ndarray:
    """Physical Laplacian in transformed coordinates (2D, y-terms dropped)."""
    f_sig = cheb_diff(f, g.grid.cheb, 1, axis=1)
    f_sigsig = cheb_diff(f, g.grid.cheb, 2, axis=1)
    f_chichi = fourier_diff(f, g.grid.fourier, 2, axis=0)
    f_sigchi = fourier_diff(f_sig, g.grid.fourier, 1, axis=0)
    return (
        f_chichi
        + (g.dsdx ** 2 + (g.dsdz ** 2)[:, None]) * f_sigsig
        + 2.0 * g.dsdx * f_sigchi
        + g.d2sdx2 * f_sig
    )


def sigma_divergence(u: np.ndarray, w: np.ndarray, g: SigmaGeometry) -> np.ndarray:
    """Transformed divergence of the velocity field (u, w)."""
    u_sig = cheb_diff(u, g.grid.cheb, 1, axis=1)
    w_sig = cheb_diff(w, g.grid.cheb, 1, axis=1)
    return fourier_diff(u, g.grid.fourier, 1, axis=0) + g.dsdx * u_sig \
        + g.dsdz[:, None] * w_sig


def w_sigma(u: np.ndarray, w: np.ndarray, g: SigmaGeometry) -> np.ndarray:
    """Transformed vertical velocity ds/dt + u ds/dx + w ds/dz."""
    return g.dsdt + u * g.dsdx + w * g.dsdz[:, None]
