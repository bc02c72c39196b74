import numpy as np
import pytest
import sympy as sp

from specwave.geometry import (
    Bathymetry,
    GeometryError,
    SigmaGeometry,
    SurfaceState,
    compute_geometry,
    sigma_divergence,
    sigma_gradient,
    sigma_laplacian,
    w_sigma,
)
from specwave.spectral import ChebyshevGrid, FourierGrid, Grid2D


def _grids(N=16, M=10, L=2.0 * np.pi):
    return FourierGrid(N, L), ChebyshevGrid(M)


def _wavy_setup(N=24, M=12, L=2.0 * np.pi):
    """Periodic depth and surface profiles plus their sympy counterparts."""
    fgrid, cgrid = _grids(N, M, L)
    x = sp.symbols("x")
    h_expr = 1.0 + 0.2 * sp.cos(x)
    eta_expr = 0.05 * sp.sin(2 * x)
    h = sp.lambdify(x, h_expr, "numpy")(fgrid.nodes)
    eta = sp.lambdify(x, eta_expr, "numpy")(fgrid.nodes)
    bathy = Bathymetry.from_depth(h, fgrid)
    surf = SurfaceState.from_eta(eta, fgrid)
    return fgrid, cgrid, bathy, surf, x, h_expr, eta_expr


class TestComputeGeometry:
    def test_flat_rest_metrics(self):
        fgrid, cgrid = _grids()
        bathy = Bathymetry.flat(1.0, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        g = compute_geometry(bathy, surf, cgrid)
        assert np.allclose(g.dsdz, 1.0)
        assert np.max(np.abs(g.dsdx)) <= 1e-12
        assert np.max(np.abs(g.d2sdx2)) <= 1e-12
        assert np.max(np.abs(g.dsdt)) <= 1e-12

    def test_sloped_bed_chain_rule(self):
        # h = h0 + a cos(x) gives dsdx = (1 - sigma) h_x / h when eta = 0
        fgrid, cgrid = _grids(32, 8)
        h = 1.0 + 0.3 * np.cos(fgrid.nodes)
        bathy = Bathymetry.from_depth(h, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        g = compute_geometry(bathy, surf, cgrid)
        hx = -0.3 * np.sin(fgrid.nodes)
        expected = (1.0 - cgrid.sigma[None, :]) * (hx / h)[:, None]
        assert np.max(np.abs(g.dsdx - expected)) <= 1e-10

    def test_prescribed_surface_rate(self):
        fgrid, cgrid = _grids()
        bathy = Bathymetry.flat(2.0, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        rate = np.cos(fgrid.nodes)
        g = compute_geometry(bathy, surf, cgrid, dd_dt=rate)
        expected = -cgrid.sigma[None, :] * (rate / 2.0)[:, None]
        assert np.max(np.abs(g.dsdt - expected)) <= 1e-14

    def test_dry_node_is_fatal(self):
        fgrid, cgrid = _grids()
        bathy = Bathymetry.flat(0.1, fgrid)
        surf = SurfaceState.from_eta(np.full(fgrid.npoints, -0.2), fgrid)
        with pytest.raises(GeometryError, match="dry node"):
            compute_geometry(bathy, surf, cgrid)

    def test_symbolic_metrics(self):
        fgrid, cgrid, bathy, surf, x, h_expr, eta_expr = _wavy_setup()
        g = compute_geometry(bathy, surf, cgrid)
        sig = sp.symbols("sigma")
        d_expr = h_expr + eta_expr
        dsdx_expr = (sp.diff(h_expr, x) - sig * sp.diff(d_expr, x)) / d_expr
        d2sdx2_expr = (
            sp.diff(h_expr, x, 2)
            - sig * sp.diff(d_expr, x, 2)
            - 2 * dsdx_expr * sp.diff(d_expr, x)
        ) / d_expr
        X = fgrid.nodes[:, None]
        S = cgrid.sigma[None, :]
        dsdx_oracle = sp.lambdify((x, sig), dsdx_expr, "numpy")(X, S)
        d2sdx2_oracle = sp.lambdify((x, sig), d2sdx2_expr, "numpy")(X, S)
        assert np.max(np.abs(g.dsdx - dsdx_oracle)) <= 1e-10
        assert np.max(np.abs(g.d2sdx2 - d2sdx2_oracle)) <= 1e-9

    def test_scaling_consistency(self):
        fgrid, cgrid, bathy, surf, *_ = _wavy_setup()
        g1 = compute_geometry(bathy, surf, cgrid)
        bathy2 = Bathymetry.from_depth(2.0 * bathy.h, fgrid)
        surf2 = SurfaceState.from_eta(2.0 * surf.eta, fgrid)
        g2 = compute_geometry(bathy2, surf2, cgrid)
        assert np.allclose(g2.d, 2.0 * g1.d)
        assert np.allclose(g2.dsdz, 0.5 * g1.dsdz)

    def test_stored_dd_dx_is_spectrally_consistent(self):
        from specwave.spectral import fourier_diff

        fgrid, cgrid, bathy, surf, *_ = _wavy_setup()
        g = compute_geometry(bathy, surf, cgrid)
        recomputed = fourier_diff(g.d, fgrid, 1)
        assert np.max(np.abs(recomputed - g.dd_dx)) <= 1e-10


class TestOperators:
    def test_gradient_of_vertical_profile(self):
        fgrid, cgrid = _grids()
        bathy = Bathymetry.flat(1.0, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        g = compute_geometry(bathy, surf, cgrid)
        f = np.broadcast_to(cgrid.sigma ** 3, g.grid.shape).copy()
        fx, fz = sigma_gradient(f, g)
        assert np.max(np.abs(fx)) <= 1e-11
        assert np.max(np.abs(fz - 3.0 * cgrid.sigma[None, :] ** 2)) <= 1e-10

    def test_gradient_of_horizontal_mode(self):
        fgrid, cgrid, bathy, surf, *_ = _wavy_setup()
        g = compute_geometry(bathy, surf, cgrid)
        f = np.broadcast_to(np.sin(fgrid.nodes)[:, None], g.grid.shape).copy()
        fx, fz = sigma_gradient(f, g)
        assert np.max(np.abs(fx - np.cos(fgrid.nodes)[:, None])) <= 1e-10
        assert np.max(np.abs(fz)) <= 1e-11

    def test_gradient_symbolic(self):
        fgrid, cgrid, bathy, surf, x, h_expr, eta_expr = _wavy_setup()
        g = compute_geometry(bathy, surf, cgrid)
        sig = sp.symbols("sigma")
        f_expr = sp.sin(x) * (2 * sig - 1)
        d_expr = h_expr + eta_expr
        dsdx_expr = (sp.diff(h_expr, x) - sig * sp.diff(d_expr, x)) / d_expr
        fx_expr = sp.diff(f_expr, x) + dsdx_expr * sp.diff(f_expr, sig)
        fz_expr = sp.diff(f_expr, sig) / d_expr
        X = fgrid.nodes[:, None]
        S = cgrid.sigma[None, :]
        f = sp.lambdify((x, sig), f_expr, "numpy")(X, S)
        fx, fz = sigma_gradient(f, g)
        assert np.max(np.abs(fx - sp.lambdify((x, sig), fx_expr, "numpy")(X, S))) <= 1e-10
        assert np.max(np.abs(fz - sp.lambdify((x, sig), fz_expr, "numpy")(X, S))) <= 1e-10

    def test_laplacian_flat_geometry(self):
        fgrid, cgrid = _grids(16, 12)
        h0 = 0.7
        bathy = Bathymetry.flat(h0, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        g = compute_geometry(bathy, surf, cgrid)
        f = np.sin(fgrid.nodes)[:, None] * cgrid.sigma[None, :] ** 4
        lap = sigma_laplacian(f, g)
        expected = (
            -np.sin(fgrid.nodes)[:, None] * cgrid.sigma[None, :] ** 4
            + np.sin(fgrid.nodes)[:, None] * 12.0 * cgrid.sigma[None, :] ** 2 / h0 ** 2
        )
        assert np.max(np.abs(lap - expected)) <= 1e-11 * np.max(np.abs(expected))

    def test_laplacian_constant_is_zero(self):
        fgrid, cgrid, bathy, surf, *_ = _wavy_setup()
        g = compute_geometry(bathy, surf, cgrid)
        f = np.full(g.grid.shape, 3.3)
        assert np.max(np.abs(sigma_laplacian(f, g))) <= 1e-11

    def test_laplacian_symbolic(self):
        fgrid, cgrid, bathy, surf, x, h_expr, eta_expr = _wavy_setup(32, 10)
        g = compute_geometry(bathy, surf, cgrid)
        sig = sp.symbols("sigma")
        f_expr = sp.sin(x) * (sig ** 3 - sig)
        d_expr = h_expr + eta_expr
        dsdx_expr = (sp.diff(h_expr, x) - sig * sp.diff(d_expr, x)) / d_expr
        d2sdx2_expr = (
            sp.diff(h_expr, x, 2)
            - sig * sp.diff(d_expr, x, 2)
            - 2 * dsdx_expr * sp.diff(d_expr, x)
        ) / d_expr
        lap_expr = (
            sp.diff(f_expr, x, 2)
            + (dsdx_expr ** 2 + 1 / d_expr ** 2) * sp.diff(f_expr, sig, 2)
            + 2 * dsdx_expr * sp.diff(sp.diff(f_expr, sig), x)
            + d2sdx2_expr * sp.diff(f_expr, sig)
        )
        X = fgrid.nodes[:, None]
        S = cgrid.sigma[None, :]
        f = sp.lambdify((x, sig), f_expr, "numpy")(X, S)
        oracle = sp.lambdify((x, sig), lap_expr, "numpy")(X, S)
        assert np.max(np.abs(sigma_laplacian(f, g) - oracle)) <= 1e-9 * np.max(np.abs(oracle))

    def test_w_sigma_still_water(self):
        fgrid, cgrid = _grids()
        bathy = Bathymetry.flat(1.0, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        g = compute_geometry(bathy, surf, cgrid)
        z = np.zeros(g.grid.shape)
        assert np.max(np.abs(w_sigma(z, z, g))) == 0.0

    def test_w_sigma_flat_steady(self):
        fgrid, cgrid = _grids()
        bathy = Bathymetry.flat(2.5, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        g = compute_geometry(bathy, surf, cgrid)
        w = np.cos(fgrid.nodes)[:, None] * cgrid.sigma[None, :]
        out = w_sigma(np.zeros_like(w), w, g)
        assert np.max(np.abs(out - w / 2.5)) <= 1e-13

    def test_w_sigma_termwise_oracle(self):
        rng = np.random.default_rng(1)
        fgrid, cgrid, bathy, surf, *_ = _wavy_setup()
        rate = rng.standard_normal(fgrid.npoints)
        g = compute_geometry(bathy, surf, cgrid, dd_dt=rate)
        u = rng.standard_normal(g.grid.shape)
        w = rng.standard_normal(g.grid.shape)
        oracle = g.dsdt + u * g.dsdx + w * (1.0 / g.d)[:, None]
        assert np.max(np.abs(w_sigma(u, w, g) - oracle)) <= 1e-12

    def test_divergence_of_gradient_matches_laplacian_flat(self):
        # with flat geometry div(grad f) and the Laplacian formula agree
        fgrid, cgrid = _grids(16, 10)
        bathy = Bathymetry.flat(1.3, fgrid)
        surf = SurfaceState.from_eta(np.zeros(fgrid.npoints), fgrid)
        g = compute_geometry(bathy, surf, cgrid)
        f = np.cos(fgrid.nodes)[:, None] * (cgrid.sigma ** 3)[None, :]
        fx, fz = sigma_gradient(f, g)
        div = sigma_divergence(fx, fz, g)
        assert np.max(np.abs(div - sigma_laplacian(f, g))) <= 1e-9
