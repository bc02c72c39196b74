"""Fourier / Chebyshev collocation machinery.

Conventions used throughout the package:

* 2D nodal fields are arrays of shape ``(N+1, M+1)``: axis 0 is the periodic
  horizontal direction (Fourier), axis 1 the vertical (Chebyshev).
* The horizontal grid has N+1 equispaced nodes ``x_n = n L / (N+1)`` without a
  duplicated endpoint.
* The vertical grid uses the M+1 Gauss-Lobatto points ``xi_m = cos(m pi / M)``
  mapped to ``sigma = (xi + 1) / 2`` so that index 0 is the free surface
  (sigma = 1) and index M the bed (sigma = 0).  Vertical derivatives are
  returned with respect to sigma (chain factor 2 per order is applied
  internally).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "FourierGrid",
    "ChebyshevGrid",
    "Grid2D",
    "Field",
    "FilterSpec",
    "fourier_diff",
    "cheb_transform",
    "cheb_inverse",
    "cheb_diff",
    "apply_filter",
    "apply_fourier_filter",
    "fourier_interp",
]


@dataclass(frozen=True)
class FourierGrid:
    """Periodic collocation grid of order N (N+1 nodes) on [0, length)."""

    order: int
    length: float

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Fourier order must be >= 1")
        if self.length <= 0:
            raise ValueError("domain length must be positive")

    @property
    def npoints(self) -> int:
        return self.order + 1

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.npoints) * (self.length / self.npoints)

    @property
    def dx(self) -> float:
        return self.length / self.npoints

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Signed wavenumbers in FFT layout, scaled by 2 pi / length."""
        return 2.0 * np.pi * np.fft.fftfreq(self.npoints, d=self.dx)

    @cached_property
    def rfft_wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.rfftfreq(self.npoints, d=self.dx)

    @property
    def max_mode(self) -> int:
        """Largest resolved integer mode, floor(N/2)."""
        return self.order // 2

    @property
    def has_nyquist(self) -> bool:
        # even number of points (odd order) leaves one unmatched mode
        return self.npoints % 2 == 0


@dataclass(frozen=True)
class ChebyshevGrid:
    """Gauss-Lobatto grid of order M on the unit sigma interval."""

    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Chebyshev order must be >= 1")

    @property
    def npoints(self) -> int:
        return self.order + 1

    @cached_property
    def xi(self) -> np.ndarray:
        """Computational nodes cos(m pi / M); xi[0] = 1, xi[M] = -1."""
        return np.cos(np.arange(self.npoints) * np.pi / self.order)

    @cached_property
    def sigma(self) -> np.ndarray:
        """Mapped nodes in [0, 1]; sigma[0] = 1 (surface), sigma[M] = 0 (bed)."""
        return 0.5 * (self.xi + 1.0)


@dataclass(frozen=True)
class Grid2D:
    """Tensor-product collocation grid (Fourier x Chebyshev)."""

    fourier: FourierGrid
    cheb: ChebyshevGrid

    @property
    def shape(self) -> tuple[int, int]:
        return (self.fourier.npoints, self.cheb.npoints)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable (x, sigma) node arrays."""
        return self.fourier.nodes[:, None], self.cheb.sigma[None, :]


@dataclass(frozen=True)
class Field:
    """Nodal scalar on a Grid2D; values must be finite and shape-matched."""

    values: np.ndarray
    grid: Grid2D

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")


def _check_finite(f: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(f)):
        raise ValueError(f"non-finite values in input to {what}")


def fourier_diff(f: np.ndarray, grid: FourierGrid, order: int = 1, axis: int = 0) -> np.ndarray:
    """Spectral derivative along a periodic axis.

    Forward FFT, modal multiply by (ik)^order, inverse FFT.  The result is
    real; for an even number of points the unmatched Nyquist mode is zeroed
    on odd-order derivatives so the operator stays real and skew-symmetric.
    """
    if order not in (1, 2):
        raise ValueError("derivative order must be 1 or 2")
    f = np.asarray(f, dtype=float)
    if f.shape[axis] != grid.npoints:
        raise ValueError("axis length does not match Fourier grid")
    _check_finite(f, "fourier_diff")
    fh = np.fft.rfft(f, axis=axis)
    k = grid.rfft_wavenumbers
    mult = (1j * k) ** order
    if order % 2 == 1 and grid.has_nyquist:
        mult = mult.copy()
        mult[-1] = 0.0
    shape = [1] * f.ndim
    shape[axis] = k.size
    fh *= mult.reshape(shape)
    return np.fft.irfft(fh, n=grid.npoints, axis=axis)


def _move_last(f: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(f, axis, -1)


def cheb_transform(f: np.ndarray, grid: ChebyshevGrid, axis: int = -1) -> np.ndarray:
    """Nodal values at Gauss-Lobatto points -> Chebyshev series coefficients.

    Returns a_m with f(xi_j) = sum_m a_m T_m(xi_j), computed as a DCT-I via
    an even extension and a real FFT.
    """
    f = np.asarray(f, dtype=float)
    if f.shape[axis] != grid.npoints:
        raise ValueError("axis length does not match Chebyshev grid")
    M = grid.order
    g = _move_last(f, axis)
    ext = np.concatenate([g, g[..., -2:0:-1]], axis=-1)
    half = np.fft.rfft(ext, axis=-1).real / M
    half[..., 0] *= 0.5
    half[..., -1] *= 0.5
    return np.moveaxis(half, -1, axis)


def cheb_inverse(coeffs: np.ndarray, grid: ChebyshevGrid, axis: int = -1) -> np.ndarray:
    """Chebyshev series coefficients -> nodal values (inverse of cheb_transform)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[axis] != grid.npoints:
        raise ValueError("coefficient count does not match Chebyshev grid")
    M = grid.order
    a = _move_last(coeffs, axis).astype(float).copy()
    a[..., 0] *= 2.0
    a[..., -1] *= 2.0
    a *= M
    vals = np.fft.irfft(a, n=2 * M, axis=-1)[..., : M + 1]
    return np.moveaxis(vals, -1, axis)


def _cheb_deriv_coeffs(a: np.ndarray) -> np.ndarray:
    """One application of the backward coefficient recursion (last axis).

    b_{q-1} = (b_{q+1} + 2 q a_q) / c_{q-1}, c_0 = 2, seeded with zeros above
    the top retained mode.
    """
    M = a.shape[-1] - 1
    b = np.zeros_like(a)
    for q in range(M, 0, -1):
        up = b[..., q + 1] if q + 1 <= M else 0.0
        b[..., q - 1] = up + 2.0 * q * a[..., q]
    b[..., 0] *= 0.5
    return b


def cheb_diff(f: np.ndarray, grid: ChebyshevGrid, order: int = 1, axis: int = -1) -> np.ndarray:
    """Derivative with respect to sigma in [0, 1] along a Chebyshev axis.

    FCT, coefficient recursion (once per order), inverse FCT; the affine map
    sigma = (xi + 1)/2 contributes a factor 2 per derivative order.
    """
    if order not in (1, 2):
        raise ValueError("derivative order must be 1 or 2")
    a = cheb_transform(f, grid, axis=axis)
    a = _move_last(a, axis)
    for _ in range(order):
        a = _cheb_deriv_coeffs(a)
    a = np.moveaxis(a, -1, axis)
    vals = cheb_inverse(a, grid, axis=axis)
    return vals * (2.0 ** order)


@dataclass(frozen=True)
class FilterSpec:
    """Exponential cutoff filter for one spectral direction.

    Modes indexed 0..order pass unchanged up to the cutoff index; above it
    the multiplier decays as exp(-alpha ((i - cutoff)/(order - cutoff))^s),
    reaching exp(-alpha) at the highest mode.
    """

    order: int
    cutoff: int
    alpha: float = 36.0
    exponent: float = 2.0

    def __post_init__(self):
        if not (0 <= self.cutoff <= self.order):
            raise ValueError("cutoff must lie in [0, order]")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")

    def multiplier(self, i) -> np.ndarray:
        """Damping factor for mode index i (scalar or array)."""
        i = np.asarray(i, dtype=float)
        span = max(self.order - self.cutoff, 1)
        arg = np.clip((i - self.cutoff) / span, 0.0, None)
        return np.where(i <= self.cutoff, 1.0, np.exp(-self.alpha * arg ** self.exponent))

    @staticmethod
    def for_fourier(grid: FourierGrid, fraction: float = 0.5,
                    alpha: float = 36.0, exponent: float = 2.0) -> "FilterSpec":
        n_max = grid.max_mode
        return FilterSpec(n_max, int(round(fraction * n_max)), alpha, exponent)

    @staticmethod
    def for_chebyshev(grid: ChebyshevGrid, fraction: float = 0.9,
                      alpha: float = 36.0, exponent: float = 2.0) -> "FilterSpec":
        return FilterSpec(grid.order, int(round(fraction * grid.order)), alpha, exponent)


def apply_fourier_filter(f: np.ndarray, grid: FourierGrid, spec: FilterSpec,
                         axis: int = 0) -> np.ndarray:
    """Damp high Fourier modes of ``f`` along ``axis``."""
    fh = np.fft.rfft(f, axis=axis)
    idx = np.rint(np.abs(grid.rfft_wavenumbers) * grid.length / (2.0 * np.pi))
    mult = spec.multiplier(idx)
    shape = [1] * f.ndim
    shape[axis] = mult.size
    fh *= mult.reshape(shape)
    return np.fft.irfft(fh, n=grid.npoints, axis=axis)


def apply_cheb_filter(f: np.ndarray, grid: ChebyshevGrid, spec: FilterSpec,
                      axis: int = -1) -> np.ndarray:
    """Damp high Chebyshev modes of ``f`` along ``axis``."""
    a = cheb_transform(f, grid, axis=axis)
    mult = spec.multiplier(np.arange(grid.npoints))
    shape = [1] * f.ndim
    shape[axis] = mult.size
    a *= mult.reshape(shape)
    return cheb_inverse(a, grid, axis=axis)


def apply_filter(f: np.ndarray, grid: Grid2D, spec_x: FilterSpec,
                 spec_sigma: FilterSpec) -> np.ndarray:
    """Apply the cutoff filter independently in both directions of a 2D field."""
    out = apply_fourier_filter(f, grid.fourier, spec_x, axis=0)
    return apply_cheb_filter(out, grid.cheb, spec_sigma, axis=1)


def fourier_interp(f: np.ndarray, grid: FourierGrid, x: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of nodal data at arbitrary x.

    Exact (to roundoff) for band-limited data; used for gauge sampling.
    """
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    fh = np.fft.rfft(f) / grid.npoints
    k = grid.rfft_wavenumbers
    weights = np.full(k.size, 2.0)
    weights[0] = 1.0
    if grid.npoints % 2 == 0:
        weights[-1] = 1.0
    phase = np.exp(1j * np.outer(x, k))
    return (phase @ (weights * fh)).real
