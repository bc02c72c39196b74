"""Analytic and semi-analytic wave solutions.

Provides the linear (Airy) wave, the fully nonlinear steady stream-function
wave solved by Fourier collocation in the co-moving frame, the empirical
breaking-steepness limit, and the oscillatory boundary-layer profile.  These
serve as initial conditions, relaxation-zone targets and verification
references for the flow solver.

Phase convention: crest at x = 0 at t = 0, propagation in +x; surface
elevation eta(x, t) = eta0(x - c t).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GRAVITY",
    "WaveParameters",
    "SteadyWave",
    "solve_dispersion",
    "battjes_max_steepness",
    "airy_wave",
    "stream_function_solve",
    "boundary_layer_profile",
    "stokes_length",
]

GRAVITY = 9.81


def battjes_max_steepness(kh: float) -> float:
    """Empirical maximum wave steepness H/L before breaking."""
    if np.any(np.asarray(kh) <= 0):
        raise ValueError("kh must be positive")
    return 0.1401 * np.tanh(0.8863 * kh)


@dataclass(frozen=True)
class WaveParameters:
    """Linear-theory wave parameters tied together by the dispersion relation."""

    H: float
    T: float
    L: float
    h: float
    k: float
    omega: float
    c: float
    g: float = GRAVITY

    @property
    def kh(self) -> float:
        return self.k * self.h

    def __post_init__(self):
        res = abs(self.omega ** 2 - self.g * self.k * np.tanh(self.kh))
        if res > 1e-12 * self.omega ** 2:
            raise ValueError("parameters violate the dispersion relation")
        if self.H > 0:
            limit = battjes_max_steepness(self.kh)
            if self.H / self.L > limit:
                warnings.warn(
                    f"steepness H/L = {self.H / self.L:.4f} exceeds the "
                    f"breaking limit {limit:.4f}", stacklevel=2,
                )


def _dispersion_k(omega: float, h: float, g: float) -> float:
    """Solve omega^2 = g k tanh(k h) by Newton from the deep-water seed."""
    target = omega ** 2
    k = target / g
    if k * h > 700.0:  # deep enough that tanh == 1 to machine precision
        return k
    for _ in range(100):
        th = np.tanh(k * h)
        f = g * k * th - target
        if abs(f) <= 1e-13 * target:
            return k
        df = g * th + g * k * h * (1.0 - th * th)
        step = f / df
        k_new = k - step
        while k_new <= 0.0:  # safeguard; never triggers from the deep seed
            step *= 0.5
            k_new = k - step
        k = k_new
    raise RuntimeError(f"dispersion solve did not converge (omega={omega}, h={h})")


def solve_dispersion(T: float, h: float, H: float = 0.0, g: float = GRAVITY) -> WaveParameters:
    """Wave parameters for a given period and depth."""
    if T <= 0 or h <= 0:
        raise ValueError("period and depth must be positive")
    omega = 2.0 * np.pi / T
    k = _dispersion_k(omega, h, g)
    return WaveParameters(H=H, T=T, L=2.0 * np.pi / k, h=h, k=k, omega=omega,
                          c=omega / k, g=g)


def wave_from_kh(kh: float, h: float, H: float = 0.0, g: float = GRAVITY) -> WaveParameters:
    """Wave parameters for a given dimensionless depth kh."""
    if kh <= 0 or h <= 0:
        raise ValueError("kh and depth must be positive")
    k = kh / h
    omega = np.sqrt(g * k * np.tanh(kh))
    return WaveParameters(H=H, T=2.0 * np.pi / omega, L=2.0 * np.pi / k, h=h,
                          k=k, omega=omega, c=omega / k, g=g)


def _cosh_ratio(a, b):
    """cosh(a)/cosh(b) evaluated without overflow for large arguments (a, b >= 0)."""
    return np.exp(a - b) * (1.0 + np.exp(-2.0 * a)) / (1.0 + np.exp(-2.0 * b))


def _sinh_ratio(a, b):
    """sinh(a)/cosh(b) evaluated without overflow (a >= 0, b >= 0)."""
    return np.exp(a - b) * (1.0 - np.exp(-2.0 * a)) / (1.0 + np.exp(-2.0 * b))


def airy_wave(params: WaveParameters, x, z, t: float = 0.0):
    """Linear-theory surface, velocities and potential.

    ``z`` is measured from the still-water level (bed at z = -h).  Returns
    (eta, u, w, phi) broadcast over the inputs.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    k, om, H, c, h = params.k, params.omega, params.H, params.c, params.h
    theta = om * t - k * x
    kzh = k * (z + h)
    ch = _cosh_ratio(kzh, k * h) / np.tanh(k * h)   # cosh(k(z+h))/sinh(kh)
    sh = _sinh_ratio(kzh, k * h) / np.tanh(k * h)   # sinh(k(z+h))/sinh(kh)
    eta = 0.5 * H * np.cos(theta)
    phi = -0.5 * H * c * ch * np.sin(theta)
    u = 0.5 * H * om * ch * np.cos(theta)
    w = -0.5 * H * om * sh * np.sin(theta)
    return eta, u, w, phi


def stokes_length(nu: float, omega: float) -> float:
    """Stokes layer scale delta_1 = sqrt(2 nu / omega)."""
    return np.sqrt(2.0 * nu / omega)


def boundary_layer_profile(z, t, params: WaveParameters, nu: float, x: float = 0.0):
    """Analytic oscillatory boundary-layer velocity above the bed.

    ``z`` is the distance from the bed (z >= 0).  The free-stream amplitude
    is the near-bed orbital velocity of the linear wave.
    """
    z = np.asarray(z, dtype=float)
    om, k, H, T = params.omega, params.k, params.H, params.T
    u0m = np.pi * H / T / np.sinh(k * params.h)
    d1 = stokes_length(nu, om)
    theta = om * t - k * x
    return u0m * (np.cos(theta) - np.exp(-z / d1) * np.cos(theta - z / d1))


# ----------------------------------------------------------------------------
# Steady nonlinear wave (stream-function collocation in the co-moving frame)
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SteadyWave:
    """Fully nonlinear steady periodic wave.

    Stream-function modal amplitudes ``B`` and surface cosine coefficients
    ``eta_coeffs`` (index j multiplies cos(j k (x - c t))), with celerity,
    volume flux and Bernoulli constant from the collocation solve.  All
    fields are dimensional; velocities are in the fixed (lab) frame where
    the mean Eulerian current is zero.
    """

    H: float
    h: float
    T: float
    k: float
    c: float
    Q: float
    R: float
    B: np.ndarray
    eta_coeffs: np.ndarray
    residual: float
    g: float = GRAVITY

    @property
    def L(self) -> float:
        return 2.0 * np.pi / self.k

    @property
    def omega(self) -> float:
        return self.k * self.c

    def surface(self, x, t: float = 0.0) -> np.ndarray:
        """Free-surface elevation above the still-water level."""
        x = np.asarray(x, dtype=float)
        theta = self.k * (x - self.c * t)
        j = np.arange(self.eta_coeffs.size)
        return np.cos(np.multiply.outer(theta, j)) @ self.eta_coeffs

    def velocity(self, x, z, t: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """Lab-frame velocities at position x and elevation z (from SWL)."""
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        theta = self.k * (x - self.c * t)
        zb = z + self.h  # height above bed
        u = np.zeros(np.broadcast_shapes(theta.shape, zb.shape))
        w = np.zeros_like(u)
        for jj in range(1, self.B.size + 1):
            amp = jj * self.k * self.B[jj - 1]
            u = u + amp * _cosh_ratio(jj * self.k * zb, jj * self.k * self.h) * np.cos(jj * theta)
            w = w + amp * _sinh_ratio(jj * self.k * zb, jj * self.k * self.h) * np.sin(jj * theta)
        return u, w

    def moving_frame_u(self, x, z, t: float = 0.0) -> np.ndarray:
        u, _ = self.velocity(x, z, t)
        return u - self.c


def _sf_system(n, That, Htarget):
    """Return residual closure for a fixed target height (units g = h = 1)."""
    m = np.arange(n + 1)
    j = np.arange(1, n + 1)[:, None]
    C = np.cos(j * m[None, :] * np.pi / n)
    S = np.sin(j * m[None, :] * np.pi / n)

    def residual(X):
        B = X[:n]
        s = X[n:2 * n + 1]
        c, k, Q, R = X[2 * n + 1:]
        jk = j * k
        jks = jk * s[None, :]
        ch = _cosh_ratio(jks, jk)
        sh = _sinh_ratio(jks, jk)
        Bj = B[:, None]
        psi = -c * s + np.sum(Bj * sh * C, axis=0)
        u = -c + np.sum(Bj * jk * ch * C, axis=0)
        w = np.sum(Bj * jk * sh * S, axis=0)
        kin = psi + Q
        dyn = 0.5 * (u * u + w * w) + s - R
        mean = (0.5 * s[0] + s[1:-1].sum() + 0.5 * s[-1]) / n - 1.0
        return np.concatenate(
            [kin, dyn, [mean, s[0] - s[-1] - Htarget, k * c * That - 2.0 * np.pi]]
        )

    return residual


def _newton(residual, X0, tol=1e-13, maxit=60):
    """Damped Newton iteration; returns (solution, residual norm, converged)."""
    X = X0.copy()
    F = residual(X)
    best = np.max(np.abs(F))
    for _ in range(maxit):
        if best <= tol:
            return X, best, True
        J = _cs_jacobian(residual, X)
        # column equilibration: near the breaking limit the high-mode columns
        # span many orders of magnitude between crest and trough rows
        scale = np.max(np.abs(J), axis=0)
        scale[scale == 0.0] = 1.0
        Js = J / scale
        try:
            dy = np.linalg.solve(Js, -F)
            dy += np.linalg.solve(Js, -F - Js @ dy)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError(f"singular Jacobian in steady-wave solve ({exc})") from exc
        dX = dy / scale
        lam = 1.0
        for _ in range(10):
            Xn = X + lam * dX
            Fn = residual(Xn)
            if np.max(np.abs(Fn)) < best:
                X, F, best = Xn, Fn, np.max(np.abs(Fn))
                break
            lam *= 0.5
        else:
            break
    return X, best, best <= tol


def _cs_jacobian(residual, X):
    """Complex-step Jacobian; exact to roundoff since the residual is analytic."""
    n = X.size
    h = 1e-200
    J = np.empty((n, n))
    for i in range(n):
        Xp = X.astype(complex)
        Xp[i] += 1j * h
        J[:, i] = residual(Xp).imag / h
    return J


def stream_function_solve(H: float, h: float, T: float, n_modes: int = 32,
                          g: float = GRAVITY, tol: float = 1e-13) -> SteadyWave:
    """Solve for a steady nonlinear wave of height H, depth h and period T.

    Newton iteration on the collocated kinematic and dynamic free-surface
    conditions in the frame moving with the wave, with amplitude continuation
    for steep targets.  Raises if the target exceeds ~1.1x the breaking limit.
    """
    if n_modes < 8:
        raise ValueError("need at least 8 stream-function modes")
    if min(H, h, T) <= 0:
        raise ValueError("H, h, T must all be positive")

    lin = solve_dispersion(T, h, g=g)
    limit = battjes_max_steepness(lin.kh) * lin.L
    if H > 1.1 * limit:
        raise ValueError(
            f"wave height {H} m exceeds 1.1x the breaking limit {limit:.4f} m"
        )
    if H > limit:
        warnings.warn(
            f"wave height {H} m exceeds the breaking limit {limit:.4f} m",
            stacklevel=2,
        )

    scale_t = np.sqrt(h / g)
    That = T / scale_t
    Hhat_target = H / h
    n = n_modes

    # linear-theory start (units g = h = 1)
    k0 = lin.k * h
    c0 = 2.0 * np.pi / (k0 * That)
    X = np.zeros(2 * n + 5)
    X[2 * n + 1:] = [c0, k0, c0, 1.0 + 0.5 * c0 ** 2]
    X[n:2 * n + 1] = 1.0
    ratio = H / limit
    n_inc = int(np.clip(np.ceil(10.0 * ratio), 1, 10))
    residual_norm = np.inf
    X_prev = None
    for i in range(1, n_inc + 1):
        Hhat = Hhat_target * i / n_inc
        if i == 1:
            theta = np.arange(n + 1) * np.pi / n
            X[0] = c0 * Hhat / (2.0 * np.tanh(k0))
            X[n:2 * n + 1] = 1.0 + 0.5 * Hhat * np.cos(theta)
        system = _sf_system(n, That, Hhat)
        seed = X if X_prev is None else 2.0 * X - X_prev  # secant predictor
        Xn, residual_norm, converged = _newton(system, seed.copy(), tol=tol)
        if not converged and X_prev is not None:
            Xn, residual_norm, converged = _newton(system, X.copy(), tol=tol)
        if not converged:
            if residual_norm <= 1e-12:
                warnings.warn(
                    f"steady-wave Newton stalled at residual {residual_norm:.2e} "
                    f"(above requested {tol:.0e}); solution is still within the "
                    "1e-12 collocation tolerance", stacklevel=2,
                )
            else:
                raise RuntimeError(
                    f"steady-wave Newton stalled at residual {residual_norm:.3e} "
                    f"at {100.0 * i / n_inc:.0f}% of the target height; "
                    "fewer modes usually conditions the system better"
                )
        X_prev, X = X, Xn

    B = X[:n]
    s = X[n:2 * n + 1]
    c, k, Q, R = X[2 * n + 1:]

    # cosine coefficients of the surface profile from its half-period samples
    eta_hat = np.zeros(n + 1)
    m = np.arange(n + 1)
    for jj in range(n + 1):
        terms = s * np.cos(jj * m * np.pi / n)
        eta_hat[jj] = (0.5 * terms[0] + terms[1:-1].sum() + 0.5 * terms[-1]) * 2.0 / n
    eta_hat[0] *= 0.5
    eta_hat[n] *= 0.5
    eta_hat[0] -= 1.0  # elevation above SWL rather than height above bed

    vel = np.sqrt(g * h)
    return SteadyWave(
        H=H, h=h, T=T,
        k=k / h,
        c=c * vel,
        Q=Q * vel * h,
        R=R * g * h,
        B=B * vel * h,
        eta_coeffs=eta_hat * h,
        residual=residual_norm,
        g=g,
    )
