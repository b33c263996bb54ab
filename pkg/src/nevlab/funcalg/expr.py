"""Expression trees for meromorphic functions.

Every node evaluates ``log f`` (complex, branch unspecified) or just
``log|f|`` on arrays of points, and enumerates its zeros and poles in a disk.
Nothing is ever exponentiated on the way up, so ``exp(exp(z))`` at ``z = 800``
is as easy as ``z`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from . import hypergamma as _hg
from .divisor import Divisor
from .errors import DivisorHitError
from .lgamma import loggamma
from .polyroots import roots_with_multiplicity, trim

HIT_TOL = 1e-12
_BIG = 40.0


def _fmt(c: complex) -> str:
    return f"{c.real:g}" if c.imag == 0 else f"{c:g}"


def _arr(z) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex))


def _log_from_roots(z, lead, roots):
    out = np.full(z.shape, np.log(complex(lead)), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for r, m in roots:
            out += m * np.log(z - r)
    return out


class FuncExpr:
    """Base class.  Subclasses are frozen dataclasses."""

    kind = "?"

    def log_value(self, z) -> np.ndarray:
        """Complex log f(z) on an array; only the real part is branch-free."""
        raise NotImplementedError(f"{self.kind} has no complex log evaluation")

    def log_abs(self, z) -> np.ndarray:
        """log|f(z)| on an array, without divisor checks (+-inf at divisor points)."""
        return self.log_value(_arr(z)).real

    def value(self, z) -> np.ndarray:
        return np.exp(self.log_value(_arr(z)))

    def divisor_entries(self, R: float) -> list[tuple[complex, int]]:
        raise NotImplementedError

    def divisor(self, R: float) -> Divisor:
        return Divisor.build(self.divisor_entries(R), R)

    @property
    def order(self) -> float | None:
        """Order of growth when known in closed form, else None."""
        return None

    @property
    def is_entire(self) -> bool:
        return False

    def poly_coeffs(self) -> np.ndarray | None:
        """Ascending coefficients if this node is a polynomial, else None."""
        return None

    # convenience constructors
    def __mul__(self, other):
        return Product((self, other))

    def __truediv__(self, other):
        return Quotient(self, other)

    def shift(self, eta) -> "Shift":
        return Shift(self, complex(eta))


@dataclass(frozen=True)
class Const(FuncExpr):
    c: complex
    kind = "const"

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if self.c == 0 or not np.isfinite(self.c):
            raise ValueError("Const needs a finite nonzero value")

    def log_value(self, z):
        return np.full(_arr(z).shape, np.log(self.c), dtype=complex)

    def divisor_entries(self, R):
        return []

    @property
    def order(self):
        return 0.0

    @property
    def is_entire(self):
        return True

    def poly_coeffs(self):
        return np.array([self.c])

    def __str__(self):
        return f"{self.c:g}"


@dataclass(frozen=True)
class Poly(FuncExpr):
    """Polynomial with ascending coefficients ``coeffs[0] + coeffs[1] z + ...``."""

    coeffs: tuple
    kind = "poly"
    _roots: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c = trim(self.coeffs)
        if c.size == 1 and c[0] == 0:
            raise ValueError("Poly is identically zero")
        object.__setattr__(self, "coeffs", tuple(complex(x) for x in c))
        object.__setattr__(self, "_roots", tuple(roots_with_multiplicity(c)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def roots(self):
        return self._roots

    def log_value(self, z):
        return _log_from_roots(_arr(z), self.coeffs[-1], self._roots)

    def value(self, z):
        return P.polyval(_arr(z), np.array(self.coeffs))

    def divisor_entries(self, R):
        return [(r, m) for r, m in self._roots if abs(r) < R]

    @property
    def order(self):
        return 0.0

    @property
    def is_entire(self):
        return True

    def poly_coeffs(self):
        return np.array(self.coeffs)

    def __str__(self):
        return "poly[" + ", ".join(_fmt(c) for c in self.coeffs) + "]"


@dataclass(frozen=True)
class Rational(FuncExpr):
    """Irreducible quotient of two polynomials (ascending coefficients)."""

    num: tuple
    den: tuple
    kind = "rational"
    _zeros: tuple = field(init=False, repr=False, compare=False)
    _poles: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, d = trim(self.num), trim(self.den)
        if d.size == 1 and d[0] == 0:
            raise ValueError("Rational denominator is identically zero")
        if n.size == 1 and n[0] == 0:
            raise ValueError("Rational numerator is identically zero")
        zs, ps = roots_with_multiplicity(n), roots_with_multiplicity(d)
        for a, _ in zs:
            for b, _ in ps:
                if abs(a - b) <= 1e-8 * max(1.0, abs(a)):
                    raise ValueError(f"Rational is reducible: common root near {a:.6g}")
        object.__setattr__(self, "num", tuple(complex(x) for x in n))
        object.__setattr__(self, "den", tuple(complex(x) for x in d))
        object.__setattr__(self, "_zeros", tuple(zs))
        object.__setattr__(self, "_poles", tuple(ps))

    @classmethod
    def from_roots(cls, zeros=(), poles=(), lead: complex = 1.0) -> "Rational":
        num = lead * P.polyfromroots(list(zeros)) if len(zeros) else np.array([lead])
        den = P.polyfromroots(list(poles)) if len(poles) else np.array([1.0])
        return cls(tuple(num), tuple(den))

    @property
    def zeros(self):
        return self._zeros

    @property
    def poles(self):
        return self._poles

    def log_value(self, z):
        z = _arr(z)
        lead = self.num[-1] / self.den[-1]
        roots = list(self._zeros) + [(p, -m) for p, m in self._poles]
        return _log_from_roots(z, lead, roots)

    def value(self, z):
        z = _arr(z)
        return P.polyval(z, np.array(self.num)) / P.polyval(z, np.array(self.den))

    def divisor_entries(self, R):
        return ([(r, m) for r, m in self._zeros if abs(r) < R]
                + [(r, -m) for r, m in self._poles if abs(r) < R])

    @property
    def order(self):
        return 0.0

    @property
    def is_entire(self):
        return not self._poles

    def poly_coeffs(self):
        if self._poles:
            return None
        return np.array(self.num) / self.den[0]

    def __str__(self):
        return f"rational(zeros={len(self._zeros)}, poles={len(self._poles)})"


@dataclass(frozen=True)
class ExpOf(FuncExpr):
    """exp(inner) for an entire inner function."""

    inner: FuncExpr
    kind = "exp"

    def __post_init__(self):
        if not self.inner.is_entire:
            raise ValueError("ExpOf needs an entire inner function")

    def log_value(self, z):
        return self.inner.value(_arr(z)).astype(complex)

    def log_abs(self, z):
        # Re g(z) directly; for g = exp(h) this is e^{Re h} cos(Im h)
        return self.inner.value(_arr(z)).real

    def divisor_entries(self, R):
        return []

    @property
    def order(self):
        pc = self.inner.poly_coeffs()
        if pc is not None:
            return float(len(trim(pc)) - 1)
        if self.inner.order is not None and self.inner.order >= 0:
            # exp of a transcendental entire function
            return math.inf
        return None

    @property
    def is_entire(self):
        return True

    def __str__(self):
        return f"exp({self.inner})"


@dataclass(frozen=True)
class Gamma(FuncExpr):
    kind = "gamma"

    def log_value(self, z):
        return loggamma(_arr(z))

    def divisor_entries(self, R):
        n = int(math.ceil(R))
        return [(complex(-k, 0.0), -1) for k in range(n) if k < R]

    @property
    def order(self):
        return 1.0

    def __str__(self):
        return "gamma"


@dataclass(frozen=True)
class HyperbolicGamma(FuncExpr):
    a: float = 1.0
    b: float = 1.0
    kind = "hypergamma"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("HyperbolicGamma needs a > 0 and b > 0")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    def log_abs(self, z):
        z = _arr(z)
        out = np.empty(z.shape)
        flat = z.ravel()
        # lattice points give +-inf rather than an exception on this path
        on = np.zeros(flat.shape, dtype=bool)
        ax = np.abs(flat.real) <= HIT_TOL
        if ax.any():
            for i in np.nonzero(ax)[0]:
                try:
                    _hg._check_lattice(self.a, self.b, flat[i:i + 1])
                except DivisorHitError:
                    on[i] = True
        res = np.empty(flat.shape)
        res[on] = np.where(flat[on].imag > 0, -np.inf, np.inf)
        if (~on).any():
            res[~on] = _hg.log_abs(self.a, self.b, flat[~on])
        out[...] = res.reshape(z.shape)
        return out

    def divisor_entries(self, R):
        return _hg.lattice(self.a, self.b, R)

    @property
    def order(self):
        return 2.0

    def __str__(self):
        return f"hypergamma({self.a:g},{self.b:g})"


@dataclass(frozen=True)
class HaymanThatcher(FuncExpr):
    """1 / prod_{n=1}^{N} (1 + H^{z-n}); poles at n + (2k+1) pi i / log H."""

    H: float = math.e
    truncation: int = 200
    kind = "hayman"

    def __post_init__(self):
        if not self.H > 1:
            raise ValueError("HaymanThatcher needs H > 1")
        if int(self.truncation) < 1:
            raise ValueError("truncation must be a positive integer")
        object.__setattr__(self, "H", float(self.H))
        object.__setattr__(self, "truncation", int(self.truncation))

    def _terms(self, z, absolute: bool):
        # sum_n log(1 + H^{z-n}) (or the sum of |Re| of the terms)
        L = math.log(self.H)
        N = self.truncation
        flat = z.ravel()
        x = flat.real
        # terms with (x - n) L > BIG: log(1 + e^u) = u to within e^{-BIG}
        n_hi = np.clip(np.floor(x - _BIG / L), 0, N).astype(int)
        n_lo = np.clip(np.ceil(x + _BIG / L), 0, N).astype(int)
        zz = x if absolute else flat
        out = (L * (n_hi * zz - 0.5 * n_hi * (n_hi + 1.0))).astype(complex)
        width = int(np.max(n_lo - n_hi)) if flat.size else 0
        with np.errstate(divide="ignore"):
            for j in range(1, width + 1):
                n = n_hi + j
                act = n <= n_lo
                if not act.any():
                    break
                u = (flat[act] - n[act]) * L
                big = u.real > 0
                term = np.empty(u.shape, dtype=complex)
                term[big] = u[big] + np.log1p(np.exp(-u[big]))
                term[~big] = np.log1p(np.exp(u[~big]))
                out[act] += np.abs(term.real) if absolute else term
        return out.reshape(z.shape)

    def log_value(self, z):
        return -self._terms(_arr(z), False)

    def rounding_bound(self, z) -> np.ndarray:
        """Floating-point allowance for log|F_N(z)|, proportional to sum |terms|."""
        return 8 * np.finfo(float).eps * (1.0 + self._terms(_arr(z), True).real)

    def tail_bound(self, z) -> np.ndarray:
        """Bound on |log F_N(z) - log F(z)| from the omitted factors n > N."""
        x = _arr(z).real
        L = math.log(self.H)
        u = np.exp((x - self.truncation - 1) * L)
        with np.errstate(divide="ignore", invalid="ignore"):
            b = u / ((1 - u) * (1 - 1 / self.H))
        return np.where(u < 1, b, np.inf)

    def divisor_entries(self, R):
        L = math.log(self.H)
        out = []
        for n in range(1, min(self.truncation, int(math.floor(R))) + 1):
            kmax = int(math.ceil(R * L / (2 * math.pi))) + 1
            for k in range(-kmax - 1, kmax + 1):
                p = complex(n, (2 * k + 1) * math.pi / L)
                if abs(p) < R:
                    out.append((p, -1))
        return out

    @property
    def order(self):
        return 2.0

    def __str__(self):
        return f"hayman({self.H:g},N={self.truncation})"


@dataclass(frozen=True)
class Shift(FuncExpr):
    """z -> inner(z + eta)."""

    inner: FuncExpr
    eta: complex = 0j
    kind = "shift"

    def __post_init__(self):
        object.__setattr__(self, "eta", complex(self.eta))

    def log_value(self, z):
        return self.inner.log_value(_arr(z) + self.eta)

    def log_abs(self, z):
        return self.inner.log_abs(_arr(z) + self.eta)

    def value(self, z):
        return self.inner.value(_arr(z) + self.eta)

    def divisor_entries(self, R):
        ents = self.inner.divisor_entries(R + abs(self.eta))
        return [(p - self.eta, k) for p, k in ents if abs(p - self.eta) < R]

    @property
    def order(self):
        return self.inner.order

    @property
    def is_entire(self):
        return self.inner.is_entire

    def poly_coeffs(self):
        pc = self.inner.poly_coeffs()
        if pc is None:
            return None
        # Taylor shift: p(z + eta)
        out = np.zeros(1, dtype=complex)
        lin = np.array([self.eta, 1.0])
        for c in pc[::-1]:
            out = P.polyadd(P.polymul(out, lin), [c])
        return trim(out)

    def __str__(self):
        return f"{self.inner}(z{self.eta:+g})"


@dataclass(frozen=True)
class Product(FuncExpr):
    factors: tuple
    kind = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("Product needs at least one factor")

    def log_value(self, z):
        z = _arr(z)
        return sum(f.log_value(z) for f in self.factors)

    def log_abs(self, z):
        z = _arr(z)
        return sum(f.log_abs(z) for f in self.factors)

    def value(self, z):
        z = _arr(z)
        out = np.ones(z.shape, dtype=complex)
        for f in self.factors:
            out = out * f.value(z)
        return out

    def divisor_entries(self, R):
        return [e for f in self.factors for e in f.divisor_entries(R)]

    @property
    def order(self):
        return _dominant_order([f.order for f in self.factors])

    @property
    def is_entire(self):
        return all(f.is_entire for f in self.factors)

    def poly_coeffs(self):
        out = np.array([1.0 + 0j])
        for f in self.factors:
            pc = f.poly_coeffs()
            if pc is None:
                return None
            out = P.polymul(out, pc)
        return trim(out)

    def __str__(self):
        return "*".join(f"({f})" for f in self.factors)


@dataclass(frozen=True)
class Quotient(FuncExpr):
    num: FuncExpr
    den: FuncExpr
    kind = "quotient"

    def log_value(self, z):
        z = _arr(z)
        return self.num.log_value(z) - self.den.log_value(z)

    def log_abs(self, z):
        z = _arr(z)
        return self.num.log_abs(z) - self.den.log_abs(z)

    def value(self, z):
        z = _arr(z)
        return self.num.value(z) / self.den.value(z)

    def divisor_entries(self, R):
        return self.num.divisor_entries(R) + [(p, -k) for p, k in self.den.divisor_entries(R)]

    @property
    def order(self):
        return _dominant_order([self.num.order, self.den.order])

    def __str__(self):
        return f"({self.num})/({self.den})"


@dataclass(frozen=True)
class Power(FuncExpr):
    inner: FuncExpr
    k: int = 1
    kind = "power"

    def __post_init__(self):
        if int(self.k) < 1:
            raise ValueError("Power needs a positive integer exponent")
        object.__setattr__(self, "k", int(self.k))

    def log_value(self, z):
        return self.k * self.inner.log_value(_arr(z))

    def log_abs(self, z):
        return self.k * self.inner.log_abs(_arr(z))

    def value(self, z):
        return self.inner.value(_arr(z)) ** self.k

    def divisor_entries(self, R):
        return [(p, self.k * m) for p, m in self.inner.divisor_entries(R)]

    @property
    def order(self):
        return self.inner.order

    @property
    def is_entire(self):
        return self.inner.is_entire

    def poly_coeffs(self):
        pc = self.inner.poly_coeffs()
        return None if pc is None else trim(P.polypow(pc, self.k))

    def __str__(self):
        return f"({self.inner})^{self.k}"


def _dominant_order(orders):
    if any(o is None for o in orders):
        return None
    top = max(orders)
    # equal top orders may cancel, so the order is then unknown
    if top > 0 and sum(1 for o in orders if o == top) > 1:
        return None
    return float(top)


def _logsumexp(terms):
    """Complex log of sum(exp(t)) over a list of equally shaped arrays."""
    stack = np.stack(terms)
    with np.errstate(invalid="ignore"):
        M = np.max(stack.real, axis=0)
        M = np.where(np.isfinite(M), M, 0.0)
        s = np.sum(np.exp(stack - M), axis=0)
    with np.errstate(divide="ignore"):
        return M + np.log(s)


@dataclass(frozen=True)
class RationalInF(FuncExpr):
    """sum_j a_j(z) f^j / sum_k b_k(z) f^k with polynomial coefficients a_j, b_k."""

    a: tuple
    b: tuple
    inner: FuncExpr
    kind = "ratinf"

    def __post_init__(self):
        a = tuple(tuple(complex(x) for x in np.atleast_1d(c)) for c in self.a)
        b = tuple(tuple(complex(x) for x in np.atleast_1d(c)) for c in self.b)
        while len(a) > 1 and not np.any(np.array(a[-1])):
            a = a[:-1]
        while len(b) > 1 and not np.any(np.array(b[-1])):
            b = b[:-1]
        if not any(np.any(np.array(c)) for c in a):
            raise ValueError("RationalInF numerator is identically zero")
        if not any(np.any(np.array(c)) for c in b):
            raise ValueError("RationalInF denominator is identically zero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        # irreducible in w: generic specializations z0 give coprime polynomials
        for z0 in (0.3141 + 0.2718j, -1.234 + 0.577j, 2.71 - 1.41j):
            pa = [P.polyval(z0, np.array(c)) for c in a]
            pb = [P.polyval(z0, np.array(c)) for c in b]
            if not _coprime(pa, pb):
                continue
            break
        else:
            raise ValueError("RationalInF is reducible in its inner argument")

    @property
    def p(self) -> int:
        return len(self.a) - 1

    @property
    def q(self) -> int:
        return len(self.b) - 1

    @property
    def constant_coeffs(self) -> bool:
        return all(len(trim(c)) <= 1 for c in self.a + self.b)

    def _side(self, coeffs, z, L):
        terms = []
        with np.errstate(divide="ignore"):
            for j, c in enumerate(coeffs):
                cz = P.polyval(z, np.array(c))
                if np.all(cz == 0):
                    continue
                terms.append(np.log(cz.astype(complex)) + j * L)
        return _logsumexp(terms)

    def log_value(self, z):
        z = _arr(z)
        L = self.inner.log_value(z)
        return self._side(self.a, z, L) - self._side(self.b, z, L)

    def divisor_entries(self, R):
        if not self.constant_coeffs:
            raise NotImplementedError("divisor of RationalInF needs constant coefficients")
        out = []
        for coeffs, sign in ((self.a, 1), (self.b, -1)):
            w = np.array([c[0] for c in coeffs])
            for root, m in roots_with_multiplicity(w):
                for p, k in preimages(self.inner, root, R):
                    out.append((p, sign * m * k))
        if self.p != self.q:
            # at a pole of order k of the inner function R(f) ~ f^(p-q)
            for p, k in self.inner.divisor(R).poles():
                out.append((p, (self.q - self.p) * k))
        return [e for e in out if e[1] != 0]

    @property
    def order(self):
        o = self.inner.order
        # polynomial coefficients only matter when the inner function is rational
        if self.constant_coeffs or (o is not None and o > 0):
            return o
        return None

    @property
    def is_entire(self):
        return self.q == 0 and self.inner.is_entire

    def __str__(self):
        return f"R[{self.p},{self.q}]({self.inner})"


def _coprime(pa, pb) -> bool:
    ra = [r for r, _ in roots_with_multiplicity(pa)]
    rb = [r for r, _ in roots_with_multiplicity(pb)]
    return not any(abs(x - y) <= 1e-8 * max(1.0, abs(x)) for x in ra for y in rb)


def preimages(inner: FuncExpr, w: complex, R: float) -> list[tuple[complex, int]]:
    """Points in |z| < R with inner(z) = w, for polynomial or exp(polynomial) inner."""
    pc = inner.poly_coeffs()
    if pc is not None:
        c = trim(pc).astype(complex)
        c[0] -= w
        return [(p, m) for p, m in roots_with_multiplicity(c) if abs(p) < R]
    if isinstance(inner, ExpOf) and inner.inner.poly_coeffs() is not None:
        if w == 0:
            return []
        g = trim(inner.inner.poly_coeffs()).astype(complex)
        gmax = float(np.sum(np.abs(g) * R ** np.arange(g.size)))
        lw = np.log(complex(w))
        out = []
        kmax = int(math.ceil((gmax + abs(lw)) / (2 * math.pi))) + 1
        for k in range(-kmax, kmax + 1):
            c = g.copy()
            c[0] -= lw + 2j * math.pi * k
            if c.size == 1:
                continue
            out += [(p, m) for p, m in roots_with_multiplicity(c) if abs(p) < R]
        return out
    if isinstance(inner, Rational):
        c = _poly_sub(np.array(inner.num), complex(w) * np.array(inner.den))
        if c.size == 1:
            return []
        return [(p, m) for p, m in roots_with_multiplicity(c) if abs(p) < R]
    if isinstance(inner, RationalInF) and inner.constant_coeffs:
        num = np.array([c[0] for c in inner.a])
        den = np.array([c[0] for c in inner.b])
        c = _poly_sub(num, complex(w) * den)
        if c.size == 1:
            return []
        out = []
        for u, m in roots_with_multiplicity(c):
            out += [(p, m * k) for p, k in preimages(inner.inner, u, R)]
        drop = max(inner.p, inner.q) - (c.size - 1)
        if drop > 0:
            # w is also the value taken at the poles of the inner function
            out += [(p, drop * k) for p, k in inner.inner.divisor(R).poles()]
        return out
    raise NotImplementedError(f"cannot invert {inner.kind} to enumerate pre-images")


def _poly_sub(a, b) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=complex)
    out[:a.size] += a
    out[:b.size] -= b
    return trim(out)


def eval_log_abs(expr: FuncExpr, z) -> float:
    """log|expr(z)| at a single point, refusing zeros and poles."""
    z = complex(z)
    tol = HIT_TOL * max(1.0, abs(z))
    try:
        ents = expr.divisor_entries(abs(z) + 1.0)
    except NotImplementedError:
        ents = []
    for p, _ in ents:
        if abs(p - z) <= tol:
            raise DivisorHitError(f"{z} is a zero or pole of {expr}")
    with np.errstate(over="ignore"):
        val = float(expr.log_abs(np.array([z]))[0])
    if np.isnan(val) or (np.isinf(val) and ents):
        raise DivisorHitError(f"{z} is a zero or pole of {expr}")
    if np.isinf(val):
        raise OverflowError(f"log|f({z})| exceeds the floating-point range")
    return val


def divisor_in_disk(expr: FuncExpr, R: float) -> Divisor:
    if not R > 0:
        raise ValueError("R must be positive")
    return expr.divisor(R)


def hyperbolic_gamma_log_abs(a: float, b: float, z) -> float:
    return eval_log_abs(HyperbolicGamma(a, b), z)
