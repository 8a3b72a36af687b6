"""Spectral utilities on uniform periodic grids.

Everything here assumes samples taken at theta_j = 2*pi*j/n.  The module
collects the FFT calculus (derivatives, antiderivatives, trigonometric
resampling), Gauss-Legendre rules on [0, 1], the classical quadrature
weights for periodic integrands with a log(4 sin^2) kernel, and the
quotient form of the Cauchy integral used for evaluation of analytic
functions near the boundary.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.signal import resample as _fft_resample

TWO_PI = 2.0 * np.pi


def grid(n: int) -> np.ndarray:
    """Uniform periodic grid theta_j = 2*pi*j/n."""
    return TWO_PI * np.arange(n) / n


def spectral_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """d^order/dtheta^order of periodic samples, spectrally accurate."""
    values = np.asarray(values)
    n = values.shape[-1]
    k = np.fft.fftfreq(n, 1.0 / n)
    mult = (1j * k) ** order
    if n % 2 == 0 and order % 2 == 1:
        mult[n // 2] = 0.0  # odd derivative of the unpaired Nyquist mode
    out = np.fft.ifft(np.fft.fft(values) * mult)
    return out.real if np.isrealobj(values) else out


def spectral_antiderivative(values: np.ndarray) -> np.ndarray:
    """Zero-mean periodic antiderivative; input must have zero mean."""
    values = np.asarray(values)
    n = values.shape[-1]
    coef = np.fft.fft(values)
    k = np.fft.fftfreq(n, 1.0 / n)
    out = np.zeros_like(coef, dtype=complex)
    nz = k != 0
    out[nz] = coef[nz] / (1j * k[nz])
    res = np.fft.ifft(out)
    return res.real if np.isrealobj(values) else res


def trig_resample(values: np.ndarray, m: int) -> np.ndarray:
    """Trigonometric interpolation of periodic samples onto m points."""
    values = np.asarray(values)
    if np.isrealobj(values):
        return _fft_resample(values, m, axis=-1)
    return (_fft_resample(values.real, m, axis=-1)
            + 1j * _fft_resample(values.imag, m, axis=-1))


def trig_eval(values: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of periodic samples at theta.

    Accepts complex theta, which yields the analytic continuation of the
    interpolant off the real axis.
    """
    values = np.asarray(values)
    n = values.shape[-1]
    coef = np.fft.fft(values) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    theta = np.asarray(theta)
    phase = np.exp(1j * np.multiply.outer(theta, k))
    if n % 2 == 0:
        phase[..., n // 2] = np.cos(theta * (n // 2))  # split Nyquist mode
    out = phase @ coef
    if np.isrealobj(values) and np.isrealobj(theta):
        return out.real
    return out


@lru_cache(maxsize=None)
def gauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def log_kernel_row(n: int) -> np.ndarray:
    """First row of the circulant rule for the periodic log kernel.

    sum_j row[(i-j) % n] * f_j approximates
    int_0^{2pi} ln(4 sin^2((theta_i - tau)/2)) f(tau) dtau
    with spectral accuracy for smooth periodic f.  Requires even n.
    """
    d = np.arange(n)
    m = np.arange(1, n // 2)
    ang = TWO_PI * np.outer(d, m) / n
    row = -(2.0 * TWO_PI / n) * (np.cos(ang) / m).sum(axis=1)
    row -= (2.0 * TWO_PI / n**2) * np.cos(np.pi * d)
    return row


@lru_cache(maxsize=None)
def log_kernel_matrix(n: int) -> np.ndarray:
    """Full circulant matrix built from :func:`log_kernel_row`."""
    row = log_kernel_row(n)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return row[idx]


def barycentric_cauchy(z: np.ndarray, dz: np.ndarray, f: np.ndarray,
                       targets: np.ndarray) -> np.ndarray:
    """Quotient form of the Cauchy integral of boundary samples f.

    z, dz are node positions and their dtheta-derivatives on a smooth closed
    curve; f holds samples of a function analytic inside.  The numerator and
    denominator share the same quadrature error, so the ratio remains
    spectrally accurate arbitrarily close to the curve (and continues f
    analytically through a thin band outside it).
    """
    z = np.asarray(z)
    targets = np.atleast_1d(np.asarray(targets))
    diff = targets[:, None] - z[None, :]
    hit = np.abs(diff) < 1e-13
    safe = np.where(hit, 1.0, diff)
    w = dz[None, :] / safe
    num = w @ f
    den = w.sum(axis=1)
    out = num / den
    if hit.any():
        ti, nj = np.nonzero(hit)
        out[ti] = f[nj]
    return out


def winding_fraction(z: np.ndarray, dz: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Approximate winding number of the curve around each target.

    Close to 1 inside, close to 0 outside; only reliable away from a thin
    band around the curve, which is all the callers need.
    """
    targets = np.atleast_1d(np.asarray(targets))
    diff = targets[:, None] - z[None, :]
    diff = np.where(np.abs(diff) < 1e-300, 1e-300, diff)
    h = TWO_PI / len(z)
    return np.abs((dz[None, :] / diff).sum(axis=1) * h / (2j * np.pi))
