"""Nevanlinna functionals m, N, T and the Poisson-Jensen reconstruction.

Circle means are computed with adaptive Gauss-Legendre panels.  Divisor
points within 5% of the circle put log singularities close to the contour;
they are removed by subtracting ``k log|z - d|`` from the integrand and adding
back its exact circle mean ``k log max(r, |d|)``.  Panel edges are also
placed at their arguments.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .funcalg import FuncExpr
from .funcalg.errors import FuncAlgError
from .quadrature import integrate

NEAR = 0.05
MAX_SUBTRACT = 64
ON_CIRCLE = 1e-7
NUDGE = 1e-6
DEFAULT_RTOL = 1e-8
MAX_NODES = 2 ** 17


class DivisorOnCircleError(FuncAlgError, ValueError):
    """A zero or pole lies on the integration circle."""


@dataclass(frozen=True)
class CircleMean:
    value: float
    quadError: float
    nodes: int
    converged: bool


def thread_count() -> int:
    env = os.environ.get("NEVLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def _near_points(expr: FuncExpr, r: float, mode: str):
    """Divisor points close to |z| = r, with the coefficient to subtract."""
    div = expr.divisor(r * (1 + NEAR) + 1e-12)
    pts = []
    for d, k in div.entries:
        gap = abs(abs(d) - r)
        if gap <= ON_CIRCLE * max(1.0, r):
            raise DivisorOnCircleError(f"divisor point {d:.12g} lies on |z| = {r:.12g}")
        if gap >= NEAR * r:
            continue
        if mode == "plus":
            coef = -k if k < 0 else 0  # only poles are singular for log+
        elif mode == "abs":
            coef = -abs(k)
        else:
            coef = k
        if coef:
            pts.append((gap, d, coef))
    pts.sort(key=lambda t: t[0])
    return [(d, c) for _, d, c in pts[:MAX_SUBTRACT]]


def _transform(mode):
    if mode == "plus":
        return lambda v: np.maximum(v, 0.0)
    if mode == "abs":
        return np.abs
    return lambda v: v


def circle_mean(expr: FuncExpr, r: float, mode: str = "plus", *, rtol: float = DEFAULT_RTOL,
                atol: float = 1e-12, max_nodes: int = MAX_NODES) -> CircleMean:
    """(1/2pi) int_0^{2pi} phi(log|f(r e^{it})|) dt with phi = log+, |.|, or identity.

    ``mode`` is ``"plus"``, ``"abs"`` or ``"log"``.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    phi = _transform(mode)
    sub = _near_points(expr, r, mode)
    locs = np.array([d for d, _ in sub], dtype=complex)
    coefs = np.array([c for _, c in sub], dtype=float)

    def f(t):
        z = r * np.exp(1j * t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = phi(expr.log_abs(z))
            if locs.size:
                v = v - (coefs[:, None] * np.log(np.abs(z[None, :] - locs[:, None]))).sum(axis=0)
        return v / (2 * np.pi)

    breaks = np.mod(np.angle(locs), 2 * np.pi) if locs.size else None
    res = integrate(f, 0.0, 2 * np.pi, rtol=rtol, atol=atol, max_nodes=max_nodes,
                    breakpoints=breaks)
    exact = float(np.sum(coefs * np.log(np.maximum(r, np.abs(locs))))) if locs.size else 0.0
    val = res.value + exact
    if not np.isfinite(val):
        raise FloatingPointError(f"non-finite circle mean for {expr} at r={r}")
    return CircleMean(val, res.error, res.nodes, res.converged)


def proximity(expr: FuncExpr, r: float, **kw) -> CircleMean:
    """m(r, f): circle mean of log+|f|."""
    out = circle_mean(expr, r, "plus", **kw)
    # the exact mean is >= 0; clip only rounding-level negatives
    if out.value < 0 and out.value > -3 * out.quadError - 1e-14:
        out = CircleMean(0.0, out.quadError, out.nodes, out.converged)
    return out


def counting(expr: FuncExpr, r: float) -> float:
    """N(r, f) = sum over poles 0 < |b| < r of log(r/|b|) + n(0, f) log r."""
    if not r > 0:
        raise ValueError("radius must be positive")
    terms = []
    for b, k in expr.divisor(r).poles():
        terms.append(k * (math.log(r) if b == 0 else math.log(r / abs(b))))
    return math.fsum(terms)


def unintegrated_counting(expr: FuncExpr, r: float) -> tuple[int, int]:
    """(number of poles, number of zeros) in |z| < r, with multiplicity."""
    div = expr.divisor(r)
    return (int(sum(k for _, k in div.poles())), int(sum(k for _, k in div.zeros())))


@dataclass(frozen=True)
class CharacteristicSample:
    r: float
    m: float
    N: float
    T: float
    quadError: float
    nodes: int
    converged: bool = True
    requested: float | None = None  # original radius when nudged


@dataclass
class CharacteristicCurve:
    samples: list
    subject: str
    nudges: list = field(default_factory=list)

    @property
    def r(self):
        return np.array([s.r for s in self.samples])

    @property
    def T(self):
        return np.array([s.T for s in self.samples])

    @property
    def m(self):
        return np.array([s.m for s in self.samples])

    @property
    def N(self):
        return np.array([s.N for s in self.samples])

    @property
    def quad_error(self):
        return np.array([s.quadError for s in self.samples])

    def is_monotone(self) -> bool:
        T, e = self.T, self.quad_error
        return bool(np.all(np.diff(T) >= -3 * (e[1:] + e[:-1]) - 1e-12))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "m", "N", "T", "quadError", "nodes"])
        for s in self.samples:
            w.writerow([f"{s.r:.17g}", f"{s.m:.17g}", f"{s.N:.17g}", f"{s.T:.17g}",
                        f"{s.quadError:.17g}", s.nodes])
        return buf.getvalue()


def clear_radius(expr: FuncExpr, r: float) -> float:
    """Nudge r outward by 1e-6 r until no divisor modulus is within 5e-7 r."""
    moduli = np.abs(expr.divisor(r * 1.01 + 1.0).locations)
    for _ in range(100):
        if not np.any(np.abs(moduli - r) < 0.5 * NUDGE * r):
            return r
        r = r * (1 + NUDGE)
    return r


def sample(expr: FuncExpr, r: float, **kw) -> CharacteristicSample:
    r0 = float(r)
    r = clear_radius(expr, r0)
    pm = proximity(expr, r, **kw)
    N = counting(expr, r)
    return CharacteristicSample(r, pm.value, N, pm.value + N, pm.quadError, pm.nodes,
                                pm.converged, None if r == r0 else r0)


def characteristic_curve(expr: FuncExpr, radii, threads: int | None = None,
                         **kw) -> CharacteristicCurve:
    radii = [float(x) for x in radii]
    if any(x <= 0 for x in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly increasing")
    threads = threads or thread_count()
    if threads > 1 and len(radii) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(lambda x: sample(expr, x, **kw), radii))
    else:
        samples = [sample(expr, x, **kw) for x in radii]
    nudges = [(s.requested, s.r) for s in samples if s.requested is not None]
    return CharacteristicCurve(samples, str(expr), nudges)


def characteristic(expr: FuncExpr, r: float, **kw) -> CharacteristicSample:
    return sample(expr, r, **kw)


def log_radii(r_min: float, r_max: float, per_decade: int = 24) -> np.ndarray:
    n = max(2, int(math.ceil(per_decade * math.log10(r_max / r_min))) + 1)
    return np.geomspace(r_min, r_max, n)


def poisson_jensen_reconstruct(expr: FuncExpr, R: float, z, *, rtol: float = 1e-11,
                               atol: float = 1e-13, max_nodes: int = MAX_NODES):
    """Right side of the Poisson-Jensen formula at the points ``z`` (|z| < R).

    Returns an array shaped like ``z`` (a float for scalar input).  The result
    reproduces log|f(z)|; the boundary log|f| is made smooth by subtracting
    the divisor points near |w| = R, whose Poisson integrals are closed form.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if np.any(np.abs(z) >= R):
        raise ValueError("reconstruction points must satisfy |z| < R")
    div = expr.divisor(R * (1 + NEAR) + 1e-12)
    near = [(d, k) for d, k in div.entries if abs(abs(d) - R) < NEAR * R]
    for d, _ in near:
        if abs(abs(d) - R) <= ON_CIRCLE * max(1.0, R):
            raise DivisorOnCircleError(f"divisor point {d:.12g} lies on |w| = {R:.12g}")
    locs = np.array([d for d, _ in near], dtype=complex)
    ks = np.array([k for _, k in near], dtype=float)
    zz = np.abs(z) ** 2

    def f(t):
        w = R * np.exp(1j * t)
        with np.errstate(divide="ignore", invalid="ignore"):
            lf = expr.log_abs(w)
            if locs.size:
                lf = lf - (ks[:, None] * np.log(np.abs(w[None, :] - locs[:, None]))).sum(axis=0)
        kern = (R * R - zz[:, None]) / np.abs(w[None, :] - z[:, None]) ** 2
        return kern * lf[None, :] / (2 * np.pi)

    res = integrate(f, 0.0, 2 * np.pi, rtol=rtol, atol=atol, max_nodes=max_nodes,
                    breakpoints=np.mod(np.angle(locs), 2 * np.pi) if locs.size else None)
    out = np.asarray(res.value, dtype=float).copy()
    # Poisson integral of log|w - d|
    for d, k in near:
        if abs(d) < R:
            out += k * (np.log(np.abs(R * R - np.conj(d) * z)) - math.log(R))
        else:
            out += k * np.log(np.abs(z - d))
    # Blaschke corrections for the divisor inside |w| < R
    for d, k in div.entries:
        if abs(d) >= R:
            continue
        with np.errstate(divide="ignore"):
            out -= k * (np.log(np.abs(R * R - np.conj(d) * z)) - math.log(R) - np.log(np.abs(z - d)))
    return float(out[0]) if scalar else out
