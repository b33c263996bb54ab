"""Polynomial roots from companion-matrix eigenvalues, polished by Newton steps.

Coefficients are in ascending order (``c[0] + c[1] z + ...``), as in
``numpy.polynomial``.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import RootIsolationError

MAX_DEGREE = 64
SEPARATION = 1e-9
# raw eigenvalues of a k-fold root spread like eps^(1/k); groups are tried
# as one multiple root from the coarsest level down
_LEVELS = (3e-2, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7)
_EPS = np.finfo(float).eps


def trim(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def companion(coeffs) -> np.ndarray:
    """Frobenius companion matrix of a trimmed ascending-order polynomial."""
    c = trim(coeffs)
    n = c.size - 1
    mat = np.zeros((n, n), dtype=complex)
    mat[1:, :-1] = np.eye(n - 1)
    mat[:, -1] = -c[:-1] / c[-1]
    return mat


def _polish(c, dc, z, steps=8, max_step=None):
    """Newton steps; a step longer than ``max_step`` is refused (the point is kept)."""
    for _ in range(steps):
        d = P.polyval(z, dc)
        ok = d != 0
        step = np.zeros_like(z)
        step[ok] = P.polyval(z[ok], c) / d[ok]
        if max_step is not None:
            step[np.abs(step) > max_step] = 0
        z = z - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(z))):
            break
    return z


def _is_multiple_root(c, z0, k) -> bool:
    """True when derivatives 0..k-1 vanish at z0 to rounding level."""
    tol = 8 * _EPS * c.size
    d = c.copy()
    for _ in range(k):
        scale = max(float(np.sum(np.abs(d) * abs(z0) ** np.arange(d.size))), 1e-300)
        if abs(P.polyval(z0, d)) > tol * scale:
            return False
        d = P.polyder(d)
    return True


def _clusters(pts: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage groups of points closer than tol * max(1, |z|)."""
    n = pts.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i):
            if abs(pts[i] - pts[j]) <= tol * max(1.0, abs(pts[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _resolve(c, pts: np.ndarray, level: int, out: list):
    """Split a group of raw eigenvalues into confirmed multiple roots and simple roots."""
    k = pts.size
    if k > 1:
        centre = complex(np.mean(pts))
        dk = c.copy()
        for _ in range(k - 1):
            dk = P.polyder(dk)
        spread = float(np.max(np.abs(pts - centre))) + 1e-300
        centre = complex(_polish(dk, P.polyder(dk), np.array([centre]), max_step=spread)[0])
        if _is_multiple_root(c, centre, k):
            out.append((centre, k))
            return
        for j in range(level, len(_LEVELS)):
            sub = _clusters(pts, _LEVELS[j])
            if len(sub) > 1:
                for g in sub:
                    _resolve(c, pts[g], j + 1, out)
                return
    # simple roots: polish each, refusing steps that leave the neighbourhood
    for z in pts:
        out.append((complex(_polish(c, P.polyder(c), np.array([z]),
                                    max_step=1e-3 * max(1.0, abs(z)))[0]), 1))


def roots_with_multiplicity(coeffs) -> list[tuple[complex, int]]:
    """Distinct roots and their multiplicities.

    Roots at the origin are factored out exactly.  Eigenvalue clusters become
    one multiple root only when the derivatives vanish at rounding level.
    Roots closer than about sqrt(eps) cannot be told apart from a multiple
    root and are reported as one; distinct roots that still end up closer
    than ``SEPARATION`` raise RootIsolationError.
    """
    c = trim(coeffs)
    deg = c.size - 1
    if deg > MAX_DEGREE:
        raise ValueError(f"polynomial degree {deg} exceeds cap {MAX_DEGREE}")
    if deg <= 0:
        return []
    out: list[tuple[complex, int]] = []
    k0 = int(np.argmax(c != 0))
    if k0:
        out.append((0j, k0))
        c = c[k0:]
    if c.size == 1:
        return out
    eig = np.linalg.eigvals(companion(c))
    found: list[tuple[complex, int]] = []
    for g in _clusters(eig, _LEVELS[0]):
        _resolve(c, eig[g], 1, found)
    found.sort(key=lambda e: (abs(e[0]), np.angle(e[0])))
    for i in range(len(found)):
        for j in range(i):
            zi, zj = found[i][0], found[j][0]
            if abs(zi - zj) < SEPARATION * max(1.0, abs(zi)):
                raise RootIsolationError(
                    f"roots near {zi:.6g} closer than {SEPARATION:g}; cannot isolate")
    return out + found


def degree(coeffs) -> int:
    c = trim(coeffs)
    return -1 if (c.size == 1 and c[0] == 0) else c.size - 1
