"""log|G(a, b; z)| for the hyperbolic gamma function.

G is the minimal solution of ``G(z + ia/2) = 2cosh(pi z / b) G(z - ia/2)`` with
``G(0) = 1``.  In the strip ``|Im z| < (a+b)/2`` it is given by

    G(z) = exp( i * int_0^inf [ sin(2yz) / (2 sinh(ay) sinh(by)) - z/(ab y) ] dy/y ).

Writing ``z = x + iv`` the real part of the exponent splits as

    log|G| = pi |x| v / (ab) - K(x, v),
    K(x, v) = int_0^inf cos(2xy) htilde(y) dy,
    htilde(y) = sinh(2vy) / (2y sinh(ay) sinh(by)) - v / (ab y^2),

where the first term comes from ``int_0^inf (cos(2xy) - 1) / y^2 dy = -pi|x|``.
``htilde`` is even, smooth at 0 and decays like ``e^{-(a+b-2|v|) y}`` apart
from the explicit ``-v/(ab y^2)`` piece, whose tail is integrated in closed
form.  Outside the band ``|Im z| <= a/2`` the value is continued with the
functional equation, one step of ``ia`` at a time.

Zeros sit at ``+i((k+1/2)a + (l+1/2)b)`` and poles at ``-i((k+1/2)a + (l+1/2)b)``,
``k, l >= 0``, with multiplicity the number of representations.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import sici

from .errors import ContinuationError, DivisorHitError

_GL_ORDER = 20
_SERIES_SWITCH = 0.02
_TAIL_DECAY = 40.0
MAX_RUNGS = 100_000
HIT_TOL = 1e-12


def _series_coeffs(a: float, b: float, v: float):
    a2, b2, v2 = a * a, b * b, v * v
    ab = a * b
    c0 = v * (4 * v2 - a2 - b2) / (6 * ab)
    c2 = v * (7 * a2 ** 2 + 10 * a2 * b2 - 40 * a2 * v2 + 7 * b2 ** 2 - 40 * b2 * v2
              + 48 * v2 ** 2) / (360 * ab)
    c4 = v * (-31 * a2 ** 3 - 49 * a2 ** 2 * b2 + 196 * a2 ** 2 * v2 - 49 * a2 * b2 ** 2
              + 280 * a2 * b2 * v2 - 336 * a2 * v2 ** 2 - 31 * b2 ** 3 + 196 * b2 ** 2 * v2
              - 336 * b2 * v2 ** 2 + 192 * v2 ** 3) / (15120 * ab)
    c6 = v * (381 * a2 ** 4 + 620 * a2 ** 3 * b2 - 2480 * a2 ** 3 * v2 + 686 * a2 ** 2 * b2 ** 2
              - 3920 * a2 ** 2 * b2 * v2 + 4704 * a2 ** 2 * v2 ** 2 + 620 * a2 * b2 ** 3
              - 3920 * a2 * b2 ** 2 * v2 + 6720 * a2 * b2 * v2 ** 2 - 3840 * a2 * v2 ** 3
              + 381 * b2 ** 4 - 2480 * b2 ** 3 * v2 + 4704 * b2 ** 2 * v2 ** 2
              - 3840 * b2 * v2 ** 3 + 1280 * v2 ** 4) / (1814400 * ab)
    return c0, c2, c4, c6


def htilde(y, a: float, b: float, v):
    """The subtracted integrand, evaluated stably for all y > 0.

    ``y`` has shape (m,), ``v`` is broadcast against it as a column (n, 1).
    """
    y = np.asarray(y, dtype=float)[None, :]
    v = np.asarray(v, dtype=float).reshape(-1, 1)
    av = np.abs(v)
    sg = np.sign(v)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        h = sg * (np.exp((2 * av - a - b) * y) - np.exp(-(2 * av + a + b) * y)) / (
            y * (-np.expm1(-2 * a * y)) * (-np.expm1(-2 * b * y)))
        out = h - v / (a * b * y * y)
    small = y * np.maximum(max(a, b), 2 * av) < _SERIES_SWITCH
    if small.any():
        c0, c2, c4, c6 = _series_coeffs(a, b, v)
        yy = y * y
        ser = c0 + yy * (c2 + yy * (c4 + yy * c6))
        out = np.where(small, ser, out)
    return out


@lru_cache(maxsize=32)
def _grid(a: float, b: float, vmax: float, xmax: float):
    """Composite Gauss-Legendre nodes on [0, Y] resolving both decay and oscillation."""
    Y = _TAIL_DECAY / (a + b - 2 * vmax)
    width = min(np.pi / max(a, b), 1.0 / (a + b), np.pi / max(2 * xmax, 1e-300))
    panels = max(8, int(np.ceil(Y / width)))
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(0.0, Y, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return Y, nodes, weights


def _cos_over_y2_tail(k, Y):
    """int_Y^inf cos(k y) / y^2 dy for k >= 0."""
    k = np.asarray(k, dtype=float)
    si, _ = sici(k * Y)
    return np.cos(k * Y) / Y - k * (0.5 * np.pi - si)


def strip_log_abs(a: float, b: float, x, v, chunk: int = 256):
    """log|G(x + iv)| for points inside the strip |v| < (a+b)/2 (vectorized)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if np.any(np.abs(v) >= 0.5 * (a + b)):
        raise ValueError("strip formula needs |Im z| < (a+b)/2")
    out = np.pi * np.abs(x) * v / (a * b)
    # K is O(exp(-2 pi |x| / max(a,b))) and negligible beyond this
    x0 = 8.0 * max(a, b)
    need = np.nonzero((np.abs(x) <= x0) & (v != 0))[0]
    if need.size == 0:
        return out
    vmax = float(np.max(np.abs(v[need])))
    # quantize the grid key so that nearby calls share nodes
    vkey = min(np.ceil(vmax / (0.05 * a)) * 0.05 * a, 0.5 * (a + b) - 0.25 * min(a, b))
    vkey = max(vkey, vmax)
    Y, nodes, weights = _grid(float(a), float(b), float(vkey), float(x0))
    for s in range(0, need.size, chunk):
        idx = need[s:s + chunk]
        ht = htilde(nodes, a, b, v[idx])
        K = (np.cos(2.0 * np.outer(x[idx], nodes)) * ht) @ weights
        # tail: htilde ~ -v/(ab y^2) beyond Y
        K -= v[idx] / (a * b) * _cos_over_y2_tail(2.0 * np.abs(x[idx]), Y)
        out[idx] -= K
    return out


def log_abs_2cosh(u):
    """log|2 cosh u| without overflow."""
    u = np.asarray(u, dtype=complex)
    s = np.where(u.real >= 0, 1.0, -1.0)
    with np.errstate(divide="ignore"):
        return np.abs(u.real) + np.log(np.abs(1.0 + np.exp(-2.0 * s * u)))


def lattice(a: float, b: float, R: float):
    """Zeros (+) and poles (-) of G inside |z| < R as (location, multiplicity) pairs."""
    counts: dict[float, int] = {}
    k = 0
    while (k + 0.5) * a + 0.5 * b < R:
        l = 0
        while (t := (k + 0.5) * a + (l + 0.5) * b) < R:
            key = round(t, 12)
            counts[key] = counts.get(key, 0) + 1
            l += 1
        k += 1
    out = []
    for t, m in counts.items():
        out.append((complex(0.0, t), m))
        out.append((complex(0.0, -t), -m))
    return out


def _check_lattice(a, b, z):
    """Raise DivisorHitError if any point is on the zero/pole lattice."""
    on_axis = np.abs(z.real) <= HIT_TOL
    if not on_axis.any():
        return
    t = np.abs(z.imag[on_axis])
    # t = (k+1/2)a + (l+1/2)b  with k, l >= 0
    kmax = int(np.max(t) / a) + 1
    ks = np.arange(kmax + 1)
    rem = (t[:, None] - (ks[None, :] + 0.5) * a) / b - 0.5
    hit = (rem >= -1e-9) & (np.abs(rem - np.round(rem)) * b <= HIT_TOL * np.maximum(1, t[:, None]))
    if hit.any():
        bad = t[np.any(hit, axis=1)][0]
        raise DivisorHitError(f"hyperbolic gamma lattice point at +-{bad:.6g}i")


def log_abs(a: float, b: float, z):
    """log|G(a, b; z)| for an array of points, continuing along the ladder."""
    if a <= 0 or b <= 0:
        raise ValueError("hyperbolic gamma needs a > 0 and b > 0")
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.all(np.isfinite(z)):
        raise ContinuationError("non-finite evaluation point")
    _check_lattice(a, b, z)
    v = z.imag
    rungs = np.where(np.abs(v) > 0.5 * a, np.ceil((np.abs(v) - 0.5 * a) / a), 0).astype(int)
    if rungs.size and rungs.max() > MAX_RUNGS:
        raise ContinuationError(f"|Im z| too large for ladder continuation ({rungs.max()} steps)")
    direction = np.sign(v)
    base = z - 1j * a * direction * rungs
    acc = np.zeros(z.shape)
    for j in range(int(rungs.max()) if rungs.size else 0):
        act = rungs > j
        # down: + log|Phi(z - ia(j + 1/2))|,  up: - log|Phi(z + ia(j + 1/2))|
        w = z[act] - 1j * a * direction[act] * (j + 0.5)
        acc[act] += direction[act] * log_abs_2cosh(np.pi * w / b)
    return acc + strip_log_abs(a, b, base.real, base.imag)
