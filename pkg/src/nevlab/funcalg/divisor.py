"""Finite zero/pole multisets in a disk, kept in a canonical order."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MERGE_TOL = 1e-9


def _key(z: complex):
    # canonical order: modulus, then argument in [0, 2pi); both rounded so
    # that rounding noise cannot reorder points of equal modulus
    mod = abs(z)
    if mod == 0:
        return (0.0, 0.0)
    w = complex(z.real, 0.0) if abs(z.imag) <= 1e-12 * mod else z
    arg = float(np.mod(np.angle(w), 2 * np.pi))
    return (round(mod, 9), round(arg, 9) % round(2 * np.pi, 9))


def canonical(entries, merge_tol: float = MERGE_TOL) -> tuple[tuple[complex, int], ...]:
    """Sort, merge coincident locations, drop entries whose multiplicities cancel."""
    items = sorted(((complex(z), int(k)) for z, k in entries), key=lambda e: _key(e[0]))
    merged: list[list] = []
    for z, k in items:
        hit = None
        # a coincident point can only sit a few slots back in modulus order
        for m in reversed(merged):
            if abs(m[0]) < abs(z) - merge_tol * max(1.0, abs(z)):
                break
            if abs(m[0] - z) <= merge_tol * max(1.0, abs(z)):
                hit = m
                break
        if hit is None:
            merged.append([z, k])
        else:
            hit[1] += k
    out = [(z, k) for z, k in merged if k != 0]
    out.sort(key=lambda e: _key(e[0]))
    return tuple(out)


@dataclass(frozen=True)
class Divisor:
    """Zeros (positive multiplicity) and poles (negative) in the open disk |z| < radius."""

    entries: tuple[tuple[complex, int], ...]
    radius: float
    _locs: np.ndarray = field(init=False, repr=False, compare=False)
    _mult: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ents = canonical(self.entries)
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "_locs", np.array([z for z, _ in ents], dtype=complex))
        object.__setattr__(self, "_mult", np.array([k for _, k in ents], dtype=int))

    @classmethod
    def build(cls, entries, radius: float) -> "Divisor":
        """Keep only entries strictly inside the disk."""
        return cls(tuple((z, k) for z, k in entries if abs(z) < radius), float(radius))

    @property
    def locations(self) -> np.ndarray:
        return self._locs

    @property
    def multiplicities(self) -> np.ndarray:
        return self._mult

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def zeros(self) -> list[tuple[complex, int]]:
        return [(z, k) for z, k in self.entries if k > 0]

    def poles(self) -> list[tuple[complex, int]]:
        """Poles with their (positive) orders."""
        return [(z, -k) for z, k in self.entries if k < 0]

    def restrict(self, radius: float) -> "Divisor":
        if radius > self.radius:
            raise ValueError("cannot extend a divisor beyond its enumeration radius")
        return Divisor.build(self.entries, radius)

    def translate(self, shift: complex) -> list[tuple[complex, int]]:
        return [(z + shift, k) for z, k in self.entries]

    def __add__(self, other: "Divisor") -> "Divisor":
        radius = min(self.radius, other.radius)
        return Divisor.build(self.entries + other.entries, radius)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((z, -k) for z, k in self.entries), self.radius)

    def scale(self, k: int) -> "Divisor":
        return Divisor(tuple((z, k * m) for z, m in self.entries), self.radius)

    def same_as(self, other: "Divisor", tol: float = 1e-9) -> bool:
        if len(self) != len(other):
            return False
        return all(k1 == k2 and abs(z1 - z2) <= tol * max(1.0, abs(z1))
                   for (z1, k1), (z2, k2) in zip(self.entries, other.entries))
