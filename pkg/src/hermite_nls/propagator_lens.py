"""Harmonic and free propagators, the Mehler kernel and the lens transform.

Conventions: e^{-itH} acts on Hermite coefficients as c_n -> e^{-it lambda_n^2} c_n,
and the free flow solves i u_t + Laplacian u = 0, i.e. multiplies the Fourier
transform by e^{-it |xi|^2}.  The lens transform

    Lu(s, x) = (1 + 4 s^2)^{-d/4} u(arctan(2s)/2, x / sqrt(1 + 4 s^2)) e^{i |x|^2 s / (1 + 4 s^2)}

maps harmonic-oscillator solutions on (-pi/4, pi/4) to free solutions on R.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .hermite_core import SpectralField, analyze, hermite_table, synthesize

MEHLER_MARGIN = 0.05


@dataclass
class LensSample:
    s: float
    t: float
    values: np.ndarray


@dataclass
class ResidualReport:
    residual_l2: float
    dt: float
    grid_params: dict
    reference_l2: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def relative(self):
        return self.residual_l2 / self.reference_l2 if self.reference_l2 > 0 else 0.0

    def to_dict(self):
        return {"residual_l2": self.residual_l2, "dt": self.dt, "grid_params": self.grid_params,
                "reference_l2": self.reference_l2, "relative": self.relative, **self.extra}


def propagate_harmonic(f, t):
    """e^{-itH} f, exact on coefficients."""
    return SpectralField(f.basis, f.coeffs * np.exp(-1j * t * f.basis.lam2))


def apply_H(f):
    return SpectralField(f.basis, f.coeffs * f.basis.lam2)


# -- Mehler kernel ---------------------------------------------------------

def _apply_axes(values, mats):
    """Apply a (possibly different) matrix along every axis: out = M . values."""
    out = values
    for k in range(values.ndim):
        out = np.moveaxis(np.tensordot(mats, out, axes=([1], [k])), 0, k)
    return out


def fourier_upsample_1d(g, factor):
    """Matrix taking grid values to band-limited values on a grid `factor` times finer.

    Zero-pads the DFT of the periodized samples.  Returns (fine nodes, fine
    spacing, matrix of shape (M, m)).
    """
    m = g.m
    M = m * factor
    P = m * g.dx
    y = g.x[0] + np.arange(M) * (P / M)
    return y, P / M, dirichlet_matrix(g, y)


def dirichlet_matrix(g, pts):
    """Periodic band-limited (Dirichlet kernel) interpolation matrix from grid g to pts."""
    m = g.m
    P = m * g.dx
    z = (np.asarray(pts)[:, None] - g.x[None, :]) / P
    num = np.sin(np.pi * m * z)
    den = m * np.sin(np.pi * z)
    close = np.abs(den) < 1e-14
    D = np.where(close, 1.0, num / np.where(close, 1.0, den))
    # at z an exact multiple of the period the kernel is (-1)^{(m-1) k}, which is 1 for odd m
    return D


def mehler_matrix_1d(t, g, safety=2.0):
    """Quadrature matrix of the 1D Mehler kernel for e^{-itH} on grid g."""
    s2, c2 = np.sin(2 * t), np.cos(2 * t)
    # largest local frequency of the integrand in y, plus the bandwidth of the data
    fmax = g.L * (abs(c2) + 1.0) / abs(s2) + np.pi / (4 * g.dx)
    factor = max(1, int(np.ceil(safety * fmax * g.dx / np.pi)))
    y, dy, U = fourier_upsample_1d(g, factor)
    pref = 1.0 / np.sqrt(2j * np.pi * s2)  # principal branch
    X = g.x[:, None]
    Y = y[None, :]
    phase = ((X * X + Y * Y) * c2 - 2 * X * Y) / (2 * s2)
    Kmat = pref * np.exp(1j * phase) * dy
    return Kmat @ U


def mehler_apply(u0, t, g):
    """e^{-itH} u0 by direct quadrature of the Mehler kernel, one axis at a time."""
    if not (MEHLER_MARGIN <= abs(t) <= np.pi / 4 - MEHLER_MARGIN):
        raise ValueError(f"|t|={abs(t):.4g} outside the admissible band "
                         f"[{MEHLER_MARGIN}, pi/4 - {MEHLER_MARGIN}]")
    u0 = np.asarray(u0, dtype=complex)
    return _apply_axes(u0, mehler_matrix_1d(t, g))


# -- free flow ---------------------------------------------------------------

def boundary_max(values):
    a = np.abs(values)
    out = 0.0
    for k in range(a.ndim):
        out = max(out, np.take(a, [0, -1], axis=k).max())
    return out


def check_boundary(values, rtol=1e-8):
    peak = np.abs(values).max()
    b = boundary_max(values)
    if peak > 0 and b > rtol * peak:
        raise ValueError(f"data not negligible at the grid boundary ({b:.3g} vs peak {peak:.3g})")


def wavenumbers(g):
    return 2 * np.pi * np.fft.fftfreq(g.m, d=g.dx)


def free_propagate(u0, t, g):
    """e^{it Laplacian} u0 on the periodized grid (symbol e^{-it|xi|^2})."""
    u0 = np.asarray(u0, dtype=complex)
    check_boundary(u0)
    if t == 0:
        return u0.copy()
    xi2 = wavenumbers(g) ** 2
    U = np.fft.fftn(u0)
    sym = 1.0
    for k in range(u0.ndim):
        shape = [1] * u0.ndim
        shape[k] = g.m
        sym = sym * np.exp(-1j * t * xi2).reshape(shape)
    return np.fft.ifftn(U * sym)


def laplacian(values, g):
    xi2 = wavenumbers(g) ** 2
    U = np.fft.fftn(values)
    sym = 0.0
    for k in range(values.ndim):
        shape = [1] * values.ndim
        shape[k] = g.m
        sym = sym + xi2.reshape(shape)
    return np.fft.ifftn(-sym * U)


# -- lens transform ------------------------------------------------------------

def lens_time(s):
    return 0.5 * np.arctan(2 * s)


def _values_at(u_t, pts, g, dim, interp):
    """Values of u(t) at the tensor product of pts, from a field or grid samples."""
    if isinstance(u_t, SpectralField):
        H = hermite_table(u_t.basis.n_max, pts)
        box = u_t.basis.to_box(u_t.coeffs)
        for _ in range(dim):
            box = np.tensordot(box, H, axes=([0], [0]))
        return box
    u_t = np.asarray(u_t, dtype=complex)
    if interp == "fourier":
        D = dirichlet_matrix(g, pts)
        return _apply_axes(u_t, D)
    if interp == "cubic":
        out = u_t
        for k in range(dim):
            out = CubicSpline(g.x, out, axis=k)(pts)
            out = np.asarray(out)
        return out
    raise ValueError(f"unknown interpolation {interp!r}")


def lens_forward(u, s, g, dim, t_range=(-np.pi / 4, np.pi / 4), interp="fourier"):
    """Lens transform of u at lensed time s, sampled on grid g.

    u is a callable t -> grid values (or SpectralField) valid on t_range.
    Grid values are interpolated to the rescaled nodes by band-limited
    Fourier interpolation (interp="cubic" uses cubic splines instead);
    spectral fields are evaluated exactly at the rescaled nodes.
    """
    t = lens_time(s)
    lo, hi = t_range
    if not (lo <= t <= hi):
        raise ValueError(f"s={s} maps to t={t:.6g} outside the sampled range [{lo}, {hi}]")
    a2 = 1.0 + 4.0 * s * s
    pts = g.x / np.sqrt(a2)
    vals = _values_at(u(t), pts, g, dim, interp)
    r2 = _radius_sq(g.x, dim)
    vals = a2 ** (-dim / 4.0) * vals * np.exp(1j * r2 * s / a2)
    return LensSample(float(s), float(t), vals)


def _radius_sq(x, dim):
    x2 = x * x
    r2 = x2
    for _ in range(dim - 1):
        r2 = np.add.outer(r2, x2)
    return r2


# -- residuals -----------------------------------------------------------------

def time_derivative(samples, dt):
    """4th-order central difference on interior samples 2..n-3."""
    u = samples
    return (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * dt)


def _spacetime_l2(arr, g, dt):
    w = g.weights(arr.ndim - 1)
    return float(np.sqrt(dt * np.sum(w * np.abs(arr) ** 2)))


def _check_samples(u, times):
    u = np.asarray(u)
    if u.shape[0] < 5:
        raise ValueError("need at least 5 time samples")
    times = np.asarray(times, dtype=float)
    if times.size != u.shape[0]:
        raise ValueError("times and samples disagree in length")
    dts = np.diff(times)
    dt = dts.mean()
    if np.abs(dts - dt).max() > 1e-9 * abs(dt):
        raise ValueError("time samples must be uniformly spaced")
    return u, times, float(dt)


def nlsh_residual(u, times, K, g, basis, nonlinear=True):
    """Discrete space-time L2 norm of i u_t - Hu - K cos(2t)|u|^2 u.

    u has shape (n_t, m, ..., m); H is applied spectrally after analysis on basis.
    """
    u, times, dt = _check_samples(u, times)
    ut = time_derivative(u, dt)
    mid = u[2:-2]
    res = np.empty_like(ut)
    lhs = np.empty_like(ut)
    for j in range(mid.shape[0]):
        Hu = synthesize(apply_H(analyze(mid[j], basis, g)), g)
        r = 1j * ut[j] - Hu
        if nonlinear:
            r = r - K * np.cos(2 * times[j + 2]) * np.abs(mid[j]) ** 2 * mid[j]
        res[j] = r
        lhs[j] = 1j * ut[j]
    return ResidualReport(_spacetime_l2(res, g, dt), dt, g.params(), _spacetime_l2(lhs, g, dt))


def nls_residual(v, times, K, g, nonlinear=True):
    """Discrete space-time L2 norm of i v_t + Laplacian v - K |v|^2 v."""
    v, times, dt = _check_samples(v, times)
    vt = time_derivative(v, dt)
    mid = v[2:-2]
    res = np.empty_like(vt)
    for j in range(mid.shape[0]):
        r = 1j * vt[j] + laplacian(mid[j], g)
        if nonlinear:
            r = r - K * np.abs(mid[j]) ** 2 * mid[j]
        res[j] = r
    return ResidualReport(_spacetime_l2(res, g, dt), dt, g.params(), _spacetime_l2(1j * vt, g, dt))
