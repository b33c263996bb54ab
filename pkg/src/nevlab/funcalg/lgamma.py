"""Complex log-gamma via the Lanczos approximation and the reflection formula."""

from __future__ import annotations

import numpy as np

from .errors import PoleError

# Lanczos g=7, n=9 (Godfrey's coefficients); relative error ~1e-15 on Re z >= 1/2.
_G = 7.0
_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)


def _lanczos_log(z):
    """Complex log Gamma(z) for Re z >= 1/2 (branch of the imaginary part unspecified)."""
    zm = z - 1.0
    acc = np.full(zm.shape, _COEF[0], dtype=complex)
    for k in range(1, _COEF.size):
        acc = acc + _COEF[k] / (zm + k)
    t = zm + _G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def log_sin_pi(z):
    """Complex log sin(pi z), accurate near the integers and for large |Im z|.

    The real part is exact to rounding; the imaginary part is a valid argument
    (not reduced to a principal range).
    """
    z = np.asarray(z, dtype=complex)
    n = np.round(z.real)
    s = z - n
    w = np.pi * s
    u = w.imag
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(u) < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out[small] = np.log(np.sin(w[small]))
        up = ~small & (u > 0)
        # sin w = (i/2) e^{-iw} (1 - e^{2iw})
        out[up] = np.log(0.5j) - 1j * w[up] + np.log1p(-np.exp(2j * w[up]))
        dn = ~small & (u <= 0)
        # sin w = (1/(2i)) e^{iw} (1 - e^{-2iw})
        out[dn] = np.log(-0.5j) + 1j * w[dn] + np.log1p(-np.exp(-2j * w[dn]))
    out = out + 1j * np.pi * np.mod(n, 2.0)
    return out


def loggamma(z):
    """Vectorized complex log Gamma(z).

    Real part is log|Gamma(z)| (``+inf`` at the poles); the imaginary part is a
    valid argument of Gamma(z) but is not reduced or made continuous.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    out[right] = _lanczos_log(z[right])
    left = ~right
    if left.any():
        zl = z[left]
        with np.errstate(divide="ignore", invalid="ignore"):
            ls = log_sin_pi(zl)
            val = _LOG_PI - ls - _lanczos_log(1.0 - zl)
        pole = np.isneginf(ls.real)
        val[pole] = np.inf
        out[left] = val
    return out


def log_abs_gamma(z):
    """log|Gamma(z)| for an array of complex points; ``inf`` at the poles."""
    return loggamma(z).real


def lgamma_complex(z: complex) -> tuple[float, float]:
    """Return ``(log|Gamma(z)|, arg Gamma(z))`` with the argument in (-pi, pi].

    Raises PoleError at the non-positive integers.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == np.round(z.real):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    val = loggamma(np.array([z]))[0]
    arg = float(np.angle(np.exp(1j * val.imag)))
    if arg == -np.pi:
        arg = np.pi
    return float(val.real), arg
