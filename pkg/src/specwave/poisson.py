"""Mixed-stage pressure Poisson problem and its p-multigrid accelerated solver.

The operator is div_sigma(stage k) o grad_sigma(stage k-1), applied matrix
free through fast transforms.  Boundary rows are built into the operator:
the free-surface row is a Dirichlet identity row (p_D = 0 there) and the bed
row evaluates the outward-normal gradient (impermeability condition).

The multigrid hierarchy lowers the polynomial orders (halving the larger
dimension first), transfers solutions by modal truncation / zero padding,
smooths with a blocked Gauss-Seidel iteration over groups of vertical lines,
and solves the coarsest level directly.  One V-cycle (or one full-multigrid
pass) preconditions a right-preconditioned restarted GMRES iteration, so the
reported residuals are true residuals.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dynamics import FlowState, ModelMode, PhysicalConstants, pressure_free_rhs
from .geometry import Bathymetry, SigmaGeometry, sigma_divergence
from .spectral import (
    ChebyshevGrid,
    FourierGrid,
    Grid2D,
    cheb_diff,
    cheb_inverse,
    cheb_transform,
    fourier_diff,
)

__all__ = [
    "SolverError",
    "PoissonProblem",
    "SolverStats",
    "MultigridHierarchy",
    "assemble_rhs",
    "apply_operator",
    "block_gauss_seidel_sweep",
    "restrict",
    "prolong",
    "v_cycle",
    "fmg",
    "solve",
]

DEFAULT_COARSE_ORDER = 4
COARSE_UNKNOWN_LIMIT = 2500


class SolverError(RuntimeError):
    """Iterative solve failure; carries the stats collected so far."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


# ----------------------------------------------------------------------------
# Problem definition
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class PoissonProblem:
    """One stage's pressure problem: geometry pair, rhs and bed normals."""

    grid: Grid2D
    geom_grad: SigmaGeometry     # stage k-1 metrics (inner gradient)
    geom_div: SigmaGeometry      # stage k metrics (outer divergence)
    rhs: np.ndarray              # interior rows div(F); surface 0; bed n.F
    bed_hx: np.ndarray           # bed slope dh/dx at the horizontal nodes

    @property
    def bed_normal(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit outward normal (nx, nz) along the bed."""
        norm = np.sqrt(1.0 + self.bed_hx ** 2)
        return -self.bed_hx / norm, -1.0 / norm


def bed_normal_dot(fx_bed: np.ndarray, fz_bed: np.ndarray, bed_hx: np.ndarray) -> np.ndarray:
    norm = np.sqrt(1.0 + bed_hx ** 2)
    return (-bed_hx * fx_bed - fz_bed) / norm


def assemble_rhs(state: FlowState, K_u: np.ndarray, K_w: np.ndarray,
                 geom_grad: SigmaGeometry, geom_div: SigmaGeometry,
                 alpha: float, beta: float, dt: float,
                 consts: PhysicalConstants, mode: ModelMode,
                 bathy: Bathymetry,
                 forcing: tuple[np.ndarray, np.ndarray] | None = None) -> PoissonProblem:
    """Build the stage Poisson problem from the previous-stage data.

    The right-hand side is the stage-k divergence of
    F = rho/(beta dt) u + rho alpha/dt K + rho f, with f the momentum forcing
    without the dynamic-pressure gradient; the bed row carries n . F, which
    makes the updated normal velocity vanish at the bed by construction.
    """
    rho = consts.rho
    if forcing is None:
        forcing = pressure_free_rhs(state, geom_grad, consts, mode)
    fx, fz = forcing
    Fx = (rho / (beta * dt)) * state.u + (rho * alpha / dt) * K_u + rho * fx
    Fz = (rho / (beta * dt)) * state.w + (rho * alpha / dt) * K_w + rho * fz
    rhs = sigma_divergence(Fx, Fz, geom_div)
    rhs[:, 0] = 0.0
    rhs[:, -1] = bed_normal_dot(Fx[:, -1], Fz[:, -1], bathy.dh_dx)
    return PoissonProblem(state.grid, geom_grad, geom_div, rhs, bathy.dh_dx)


def _gradient_pair(p: np.ndarray, grid: Grid2D, geom: SigmaGeometry):
    p_chi = fourier_diff(p, grid.fourier, 1, axis=0)
    p_sig = cheb_diff(p, grid.cheb, 1, axis=1)
    gx = p_chi + geom.dsdx * p_sig
    gz = geom.dsdz[:, None] * p_sig
    return gx, gz


def apply_operator(p: np.ndarray, problem: PoissonProblem) -> np.ndarray:
    """Matrix-free div_sigma(k) grad_sigma(k-1) with boundary rows in place."""
    grid = problem.grid
    gx, gz = _gradient_pair(p, grid, problem.geom_grad)
    out = sigma_divergence(gx, gz, problem.geom_div)
    out[:, 0] = p[:, 0]
    out[:, -1] = bed_normal_dot(gx[:, -1], gz[:, -1], problem.bed_hx)
    return out


# ----------------------------------------------------------------------------
# Transfers (modal truncation / zero padding)
# ----------------------------------------------------------------------------


def fourier_resample(f: np.ndarray, src: FourierGrid, dst: FourierGrid,
                     axis: int = 0) -> np.ndarray:
    """Move nodal data between periodic grids by FFT mode  truncation/padding."""
    F = np.fft.fft(f, axis=axis) / src.npoints
    shape = list(f.shape)
    shape[axis] = dst.npoints
    out = np.zeros(shape, dtype=complex)
    kmax = min((src.npoints - 1) // 2, (dst.npoints - 1) // 2)
    src_idx = [slice(None)] * f.ndim
    dst_idx = [slice(None)] * f.ndim
    src_idx[axis] = slice(0, kmax + 1)
    dst_idx[axis] = slice(0, kmax + 1)
    out[tuple(dst_idx)] = F[tuple(src_idx)]
    if kmax > 0:
        src_idx[axis] = slice(-kmax, None)
        dst_idx[axis] = slice(-kmax, None)
        out[tuple(dst_idx)] = F[tuple(src_idx)]
    return np.fft.ifft(out * dst.npoints, axis=axis).real


def cheb_resample(f: np.ndarray, src: ChebyshevGrid, dst: ChebyshevGrid,
                  axis: int = -1) -> np.ndarray:
    """Move nodal data between Gauss-Lobatto grids by coefficient truncation/padding."""
    a = cheb_transform(f, src, axis=axis)
    srcn, dstn = src.npoints, dst.npoints
    shape = list(f.shape)
    shape[axis] = dstn
    out = np.zeros(shape)
    idx_src = [slice(None)] * f.ndim
    idx_dst = [slice(None)] * f.ndim
    keep = min(srcn, dstn)
    idx_src[axis] = slice(0, keep)
    idx_dst[axis] = slice(0, keep)
    out[tuple(idx_dst)] = a[tuple(idx_src)]
    return cheb_inverse(out, dst, axis=axis)


def resample_field(f: np.ndarray, src: Grid2D, dst: Grid2D) -> np.ndarray:
    out = fourier_resample(f, src.fourier, dst.fourier, axis=0)
    return cheb_resample(out, src.cheb, dst.cheb, axis=1)


def restrict(f: np.ndarray, src: Grid2D, dst: Grid2D) -> np.ndarray:
    """Fine-to-coarse transfer (modal truncation)."""
    return resample_field(f, src, dst)


def prolong(f: np.ndarray, src: Grid2D, dst: Grid2D) -> np.ndarray:
    """Coarse-to-fine transfer (modal zero padding)."""
    return resample_field(f, src, dst)


# ----------------------------------------------------------------------------
# Hierarchy levels
# ----------------------------------------------------------------------------


@dataclass
class _LevelOperator:
    """Per-level rediscretized operator data and smoother blocks."""

    grid: Grid2D
    sx1: np.ndarray          # grad-stage ds/dx, 2D
    sz1: np.ndarray          # grad-stage ds/dz, 1D
    sx2: np.ndarray          # div-stage ds/dx, 2D
    sz2: np.ndarray          # div-stage ds/dz, 1D
    bed_hx: np.ndarray
    Dx: np.ndarray           # dense horizontal derivative (matches fast path)
    Ds: np.ndarray           # dense vertical sigma-derivative
    Dx2: np.ndarray
    block_cols: list = field(default_factory=list)
    block_lu: list = field(default_factory=list)
    coarse_lu: tuple | None = None

    @property
    def shape(self):
        return self.grid.shape

    def apply(self, p: np.ndarray) -> np.ndarray:
        grid = self.grid
        p_chi = fourier_diff(p, grid.fourier, 1, axis=0)
        p_sig = cheb_diff(p, grid.cheb, 1, axis=1)
        gx = p_chi + self.sx1 * p_sig
        gz = self.sz1[:, None] * p_sig
        gx_chi = fourier_diff(gx, grid.fourier, 1, axis=0)
        gx_sig = cheb_diff(gx, grid.cheb, 1, axis=1)
        gz_sig = cheb_diff(gz, grid.cheb, 1, axis=1)
        out = gx_chi + self.sx2 * gx_sig + self.sz2[:, None] * gz_sig
        out[:, 0] = p[:, 0]
        out[:, -1] = bed_normal_dot(gx[:, -1], gz[:, -1], self.bed_hx)
        return out

    def apply_columns(self, delta: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Operator action on a field supported only on the given x-columns.

        Used for the incremental residual update inside the Gauss-Seidel
        sweep; costs O(P c M) instead of a full transform-based apply.
        """
        P, Mp1 = self.shape
        d_sig = delta @ self.Ds.T
        gx_local = self.sx1[cols] * d_sig                 # on cols only
        gx_full = self.Dx[:, cols] @ delta                # dense x-coupling
        gx_full[cols] += gx_local
        gz_local = self.sz1[cols, None] * d_sig
        out = self.Dx2[:, cols] @ delta + self.Dx[:, cols] @ gx_local
        out += self.sx2 * (gx_full @ self.Ds.T)
        out[cols] += self.sz2[cols, None] * (gz_local @ self.Ds.T)
        out[:, 0] = 0.0
        out[cols, 0] = delta[:, 0]
        nx, nz = -self.bed_hx, -np.ones(P)
        norm = np.sqrt(1.0 + self.bed_hx ** 2)
        out[:, -1] = (nx * gx_full[:, -1]) / norm
        out[cols, -1] += (nz[cols] * gz_local[:, -1]) / norm
        return out

    # -- dense assembly -----------------------------------------------------

    def _block_matrix(self, cols: np.ndarray) -> np.ndarray:
        """Dense diagonal block for the column group, boundary rows included."""
        Mp1 = self.grid.cheb.npoints
        c = cols.size
        Dxb = self.Dx[np.ix_(cols, cols)]
        Dx2b = self.Dx2[np.ix_(cols, cols)]
        Ds, I = self.Ds, np.eye(Mp1)
        blk = np.einsum("ij,mp->imjp", Dx2b, I)
        blk += np.einsum("ij,jm,mp->imjp", Dxb, self.sx1[cols], Ds)
        blk += np.einsum("im,ij,mp->imjp", self.sx2[cols], Dxb, Ds)
        for a, n in enumerate(cols):
            blk[a, :, a, :] += self.sx2[n][:, None] * (Ds @ (self.sx1[n][:, None] * Ds))
            blk[a, :, a, :] += self.sz2[n] * self.sz1[n] * (Ds @ Ds)
        # Dirichlet surface rows
        blk[:, 0, :, :] = 0.0
        for a in range(c):
            blk[a, 0, a, 0] = 1.0
        # Neumann bed rows
        norm = np.sqrt(1.0 + self.bed_hx ** 2)
        blk[:, -1, :, :] = 0.0
        for a, n in enumerate(cols):
            nx = -self.bed_hx[n] / norm[n]
            nz = -1.0 / norm[n]
            blk[a, -1, :, -1] += nx * Dxb[a, :]
            blk[a, -1, a, :] += nx * self.sx1[n, -1] * Ds[-1, :]
            blk[a, -1, a, :] += nz * self.sz1[n] * Ds[-1, :]
        return blk.reshape(c * Mp1, c * Mp1)

    def build_blocks(self, width: int) -> None:
        P = self.grid.fourier.npoints
        n_blocks = max(2, P // max(width, 1))
        n_blocks = min(n_blocks, P)
        self.block_cols = [np.sort(g) for g in np.array_split(np.arange(P), n_blocks)]
        self.block_lu = [scipy.linalg.lu_factor(self._block_matrix(cols))
                         for cols in self.block_cols]

    def build_coarse_solver(self) -> None:
        P = self.grid.fourier.npoints
        A = self._block_matrix(np.arange(P))
        self.coarse_lu = scipy.linalg.lu_factor(A)

    def direct_solve(self, f: np.ndarray) -> np.ndarray:
        if self.coarse_lu is None:
            raise SolverError("coarsest level has no factorization")
        sol = scipy.linalg.lu_solve(self.coarse_lu, f.reshape(-1))
        return sol.reshape(self.shape)

    def sweep(self, x: np.ndarray, r: np.ndarray, direction: str = "forward"):
        """One blocked Gauss-Seidel sweep; x and r are updated in place.

        r must be the current residual f - A x on entry and is maintained
        incrementally as blocks update.
        """
        order = range(len(self.block_cols))
        if direction == "backward":
            order = reversed(order)
        elif direction != "forward":
            raise ValueError("direction must be 'forward' or 'backward'")
        Mp1 = self.grid.cheb.npoints
        for b in order:
            cols = self.block_cols[b]
            delta = scipy.linalg.lu_solve(self.block_lu[b],
                                          r[cols].reshape(-1)).reshape(cols.size, Mp1)
            x[cols] += delta
            r -= self.apply_columns(delta, cols)
        return x, r


def _coarsen_orders(N: int, M: int, min_order: int = DEFAULT_COARSE_ORDER):
    """Order chain for the hierarchy: halve the larger dimension, keep even."""

    def half(n):
        nn = n // 2
        if nn % 2 == 1:
            nn += 1
        return max(nn, min_order)

    chain = [(N, M)]
    while True:
        n, m = chain[-1]
        nn, mm = n, m
        if n >= m and n > min_order:
            nn = half(n)
        if m >= n and m > min_order:
            mm = half(m)
        if (nn, mm) == (n, m):
            break
        chain.append((nn, mm))
    return chain


class MultigridHierarchy:
    """Grid levels, rediscretized operators and smoother factorizations."""

    def __init__(self, problem: PoissonProblem, block_width: int = 4,
                 min_order: int = DEFAULT_COARSE_ORDER):
        fine = problem.grid
        self.block_width = block_width
        orders = _coarsen_orders(fine.fourier.order, fine.cheb.order, min_order)
        if (orders[-1][0] + 1) * (orders[-1][1] + 1) > COARSE_UNKNOWN_LIMIT:
            warnings.warn("coarsest multigrid level exceeds the direct-solve budget")
        self.levels: list[_LevelOperator] = []
        grids = [fine]
        for (n, m) in orders[1:]:
            grids.append(Grid2D(FourierGrid(n, fine.fourier.length), ChebyshevGrid(m)))
        g1, g2 = problem.geom_grad, problem.geom_div
        sx1, sz1 = g1.dsdx, g1.dsdz
        sx2, sz2 = g2.dsdx, g2.dsdz
        bed_hx = problem.bed_hx
        prev = fine
        for grid in grids:
            if grid is not prev:
                sx1 = resample_field(sx1, prev, grid)
                sx2 = resample_field(sx2, prev, grid)
                sz1 = fourier_resample(sz1, prev.fourier, grid.fourier)
                sz2 = fourier_resample(sz2, prev.fourier, grid.fourier)
                bed_hx = fourier_resample(bed_hx, prev.fourier, grid.fourier)
                prev = grid
            P = grid.fourier.npoints
            Dx = fourier_diff(np.eye(P), grid.fourier, 1, axis=0)
            Ds = cheb_diff(np.eye(grid.cheb.npoints), grid.cheb, 1, axis=0)
            self.levels.append(_LevelOperator(
                grid, sx1.copy(), sz1.copy(), sx2.copy(), sz2.copy(),
                bed_hx.copy(), Dx, Ds, Dx @ Dx,
            ))
        for lvl in self.levels[:-1]:
            lvl.build_blocks(block_width)
        self.levels[-1].build_coarse_solver()

    @property
    def depth(self) -> int:
        return len(self.levels)

    def grid_at(self, i: int) -> Grid2D:
        return self.levels[i].grid


def block_gauss_seidel_sweep(p: np.ndarray, problem: PoissonProblem,
                             n_blocks: int, direction: str = "forward",
                             rhs: np.ndarray | None = None) -> np.ndarray:
    """One standalone blocked Gauss-Seidel sweep on the fine problem."""
    f = problem.rhs if rhs is None else rhs
    P = problem.grid.fourier.npoints
    width = max(1, P // max(n_blocks, 2))
    hier = MultigridHierarchy.__new__(MultigridHierarchy)
    lvl = _LevelOperator(
        problem.grid,
        problem.geom_grad.dsdx, problem.geom_grad.dsdz,
        problem.geom_div.dsdx, problem.geom_div.dsdz,
        problem.bed_hx,
        fourier_diff(np.eye(P), problem.grid.fourier, 1, axis=0),
        cheb_diff(np.eye(problem.grid.cheb.npoints), problem.grid.cheb, 1, axis=0),
        np.zeros((P, P)),
    )
    lvl.Dx2 = lvl.Dx @ lvl.Dx
    lvl.build_blocks(width)
    x = p.copy()
    r = f - lvl.apply(x)
    x, _ = lvl.sweep(x, r, direction)
    return x


def v_cycle(hier: MultigridHierarchy, f: np.ndarray, level: int | None = None,
            x0: np.ndarray | None = None, v1: int = 2, v2: int = 2) -> np.ndarray:
    """One recursive V-cycle on the given level (default: finest)."""
    i = len(hier.levels) - 1 if level is None else level
    lvl = hier.levels[i]
    if i == len(hier.levels) - 1:
        return lvl.direct_solve(f)
    if x0 is None:
        x = np.zeros(lvl.shape)
        r = f.copy()
    else:
        x = x0.copy()
        r = f - lvl.apply(x)
    for _ in range(v1):
        x, r = lvl.sweep(x, r, "forward")
    coarse = hier.levels[i + 1]
    rc = restrict(r, lvl.grid, coarse.grid)
    ec = v_cycle(hier, rc, level=i + 1, v1=v1, v2=v2)
    x += prolong(ec, coarse.grid, lvl.grid)
    r = f - lvl.apply(x)
    for _ in range(v2):
        x, r = lvl.sweep(x, r, "backward")
    return x


def fmg(hier: MultigridHierarchy, f: np.ndarray, v1: int = 2, v2: int = 2) -> np.ndarray:
    """Full multigrid pass: coarse-to-fine V-cycles with prolongated seeds."""
    fs = [f]
    for i in range(len(hier.levels) - 1):
        fs.append(restrict(fs[-1], hier.levels[i].grid if i == 0 else hier.levels[i].grid,
                           hier.levels[i + 1].grid))
    fs = [f]
    for i in range(len(hier.levels) - 1):
        fs.append(restrict(fs[i], hier.levels[i].grid, hier.levels[i + 1].grid))
    x = None
    for i in range(len(hier.levels) - 1, -1, -1):
        x = v_cycle(hier, fs[i], level=i, x0=x, v1=v1, v2=v2)
        if i > 0:
            x = prolong(x, hier.levels[i].grid, hier.levels[i - 1].grid)
    return x


# ----------------------------------------------------------------------------
# Right-preconditioned restarted GMRES
# ----------------------------------------------------------------------------


@dataclass
class SolverStats:
    iterations: int
    residuals: list
    seconds: float
    cycle: str
    converged: bool
    capped: bool
    N: int
    M: int

    def __post_init__(self):
        hist = np.asarray(self.residuals)
        if hist.size > 1 and np.any(np.diff(hist) > 1e-14 * hist[:-1] + 1e-300):
            warnings.warn("preconditioned residual history is not monotone")

    def to_json_dict(self, precond: str, tol: float) -> dict:
        return {
            "precond": precond,
            "tol": tol,
            "iterations": self.iterations,
            "seconds": self.seconds,
            "N": self.N,
            "M": self.M,
            "converged": self.converged,
            "capped": self.capped,
        }


def solve(problem: PoissonProblem, precond: str = "vcycle", tol: float = 1e-10,
          restart: int = 30, maxit: int = 2000, v1: int = 2, v2: int = 2,
          block_width: int = 4, hierarchy: MultigridHierarchy | None = None,
          x0: np.ndarray | None = None,
          stagnation_window: int = 50) -> tuple[np.ndarray, SolverStats]:
    """Solve the pressure problem by (preconditioned) restarted GMRES.

    Right preconditioning keeps the convergence criterion on the true
    relative residual ||b - A x|| / ||b||.  The preconditioner is a single
    V-cycle or FMG pass of the p-multigrid hierarchy; 'none' runs plain
    GMRES.  An existing hierarchy may be passed to amortize setup.
    """
    t0 = time.perf_counter()
    grid = problem.grid
    b = problem.rhs
    bnorm = np.linalg.norm(b)
    if precond not in ("none", "vcycle", "fmg"):
        raise ValueError(f"unknown preconditioner {precond!r}")
    if bnorm == 0.0:
        stats = SolverStats(0, [0.0], time.perf_counter() - t0,
                            {"none": "none", "vcycle": "V", "fmg": "FMG"}[precond],
                            True, False, grid.fourier.order, grid.cheb.order)
        return np.zeros(grid.shape), stats

    if precond != "none" and hierarchy is None:
        hierarchy = MultigridHierarchy(problem, block_width=block_width)

    def apply_M(v):
        if precond == "vcycle":
            return v_cycle(hierarchy, v, v1=v1, v2=v2)
        if precond == "fmg":
            return fmg(hierarchy, v, v1=v1, v2=v2)
        return v

    x = np.zeros(grid.shape) if x0 is None else x0.copy()
    r = b - apply_operator(x, problem) if x0 is not None else b.copy()
    history = [np.linalg.norm(r) / bnorm]
    total = 0
    converged = history[0] <= tol
    shape = grid.shape

    while not converged and total < maxit:
        beta = np.linalg.norm(r)
        V = [r.reshape(-1) / beta]
        Z = []
        H = np.zeros((restart + 1, restart))
        cs = np.zeros(restart)
        sn = np.zeros(restart)
        g = np.zeros(restart + 1)
        g[0] = beta
        j = 0
        while j < restart and total < maxit:
            z = apply_M(V[j].reshape(shape))
            Z.append(z.reshape(-1))
            w = apply_operator(z, problem).reshape(-1)
            for i in range(j + 1):
                H[i, j] = V[i] @ w
                w -= H[i, j] * V[i]
            H[j + 1, j] = np.linalg.norm(w)
            if H[j + 1, j] > 0.0:
                V.append(w / H[j + 1, j])
            # apply accumulated Givens rotations, then form the new one
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = np.hypot(H[j, j], H[j + 1, j])
            cs[j] = H[j, j] / denom if denom else 1.0
            sn[j] = H[j + 1, j] / denom if denom else 0.0
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            total += 1
            res = abs(g[j + 1]) / bnorm
            history.append(min(res, history[-1]))
            j += 1
            if res <= tol:
                break
        y = scipy.linalg.solve_triangular(H[:j, :j], g[:j], lower=False)
        x = x + (np.array(Z[:j]).T @ y).reshape(shape)
        r = b - apply_operator(x, problem)
        true_res = np.linalg.norm(r) / bnorm
        history[-1] = min(history[-1], true_res) if true_res <= tol else history[-1]
        converged = true_res <= tol
        if not converged and len(history) > stagnation_window:
            if history[-1] > history[-stagnation_window - 1] * (1.0 - 1e-10):
                stats = SolverStats(total, history, time.perf_counter() - t0,
                                    {"none": "none", "vcycle": "V", "fmg": "FMG"}[precond],
                                    False, False, grid.fourier.order, grid.cheb.order)
                raise SolverError(
                    f"GMRES stagnated at relative residual {history[-1]:.3e} "
                    f"after {total} iterations", stats)

    stats = SolverStats(total, history, time.perf_counter() - t0,
                        {"none": "none", "vcycle": "V", "fmg": "FMG"}[precond],
                        converged, total >= maxit and not converged,
                        grid.fourier.order, grid.cheb.order)
    if not converged:
        raise SolverError(
            f"GMRES failed to reach tol {tol:g} within {maxit} iterations "
            f"(residual {history[-1]:.3e})", stats)
    return x, stats
