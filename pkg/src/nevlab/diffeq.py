"""Linear difference equations: explicit gamma-product solutions, growth lower
bounds from coefficient dominance, and instance checks of degree bounds for
equations with a rational right side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .funcalg import (Const, ExpOf, FuncExpr, Gamma, Poly, Product, Quotient, Rational,
                      RationalInF, Shift, eval_log_abs, from_spec)
from .funcalg.polyroots import roots_with_multiplicity, trim
from .growth import DEFAULT_EPSILON, slack
from .nevanlinna import sample
from .report import FAIL, Report

ORDER_DOMINANCE = "order-dominance"
DEGREE_DOMINANCE = "degree-dominance"
NO_BOUND = "no-bound"


# ---------------------------------------------------------------- equations

@dataclass(frozen=True)
class LinearDifferenceEquation:
    """sum_j A_j(z) f(z+j) = 0; a zero coefficient is stored as None."""

    coefficients: tuple

    def __post_init__(self):
        cs = tuple(self.coefficients)
        if len(cs) < 2:
            raise ValueError("need at least two coefficients")
        if cs[0] is None or cs[-1] is None:
            raise ValueError("A_0 and A_n must not vanish identically")
        object.__setattr__(self, "coefficients", cs)

    @property
    def shiftCount(self) -> int:
        return len(self.coefficients) - 1

    def residual(self, f: FuncExpr, z) -> np.ndarray:
        """sum_j A_j(z) f(z+j) at the points z."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for j, A in enumerate(self.coefficients):
            if A is not None:
                out += A.value(z) * f.value(z + j)
        return out

    def degrees(self) -> list:
        out = []
        for A in self.coefficients:
            pc = None if A is None else A.poly_coeffs()
            out.append(None if pc is None else len(trim(pc)) - 1)
        return out


def _as_coeffs(c) -> np.ndarray | None:
    if c is None:
        return None
    if isinstance(c, FuncExpr):
        pc = c.poly_coeffs()
        if pc is None:
            raise ValueError(f"{c.kind} coefficient is not a polynomial")
        return trim(np.asarray(pc, dtype=complex))
    c = trim(np.atleast_1d(np.asarray(c, dtype=complex)))
    return None if (c.size == 1 and c[0] == 0) else c


def _to_poly(c: np.ndarray | None):
    if c is None:
        return None
    c = trim(c)
    if c.size == 1 and abs(c[0]) == 0:
        return None
    return Poly(tuple(c))


def _add(acc: np.ndarray | None, c: np.ndarray) -> np.ndarray:
    if acc is None:
        return c.copy()
    n = max(acc.size, c.size)
    out = np.zeros(n, dtype=complex)
    out[:acc.size] += acc
    out[:c.size] += c
    return out


def taylor_shift(c, h) -> np.ndarray:
    """Coefficients of c(z + h)."""
    c = np.asarray(c, dtype=complex)
    out = np.zeros(c.size, dtype=complex)
    for k, ck in enumerate(c):
        for i in range(k + 1):
            out[i] += ck * comb(k, i) * h ** (k - i)
    return out


def delta_to_shift(deltaCoeffs, lagged: bool = False) -> LinearDifferenceEquation:
    """Rewrite sum_m Q_m(z) D^m f(z) = 0 as sum_j P_j(z) f(z+j) = 0.

    D is the forward difference.  With ``lagged`` the terms are
    Q_m(z) D^m f(z-m); the result is then moved to base point z by z -> z+n.
    """
    Q = [_as_coeffs(c) for c in deltaCoeffs]
    n = len(Q) - 1
    Pj = [None] * (n + 1)
    for m, q in enumerate(Q):
        if q is None:
            continue
        if lagged:
            q = taylor_shift(q, n)
        for i in range(m + 1):
            j = n - m + i if lagged else i
            Pj[j] = _add(Pj[j], comb(m, i) * (-1) ** (m - i) * q)
    return LinearDifferenceEquation(tuple(_to_poly(p) for p in Pj))


def shift_to_delta(eq: LinearDifferenceEquation) -> list:
    """Inverse of ``delta_to_shift`` (unlagged): Q_m = sum_{j>=m} binom(j, m) P_j."""
    P = [_as_coeffs(c) for c in eq.coefficients]
    Q = [None] * len(P)
    for j, p in enumerate(P):
        if p is None:
            continue
        for m in range(j + 1):
            Q[m] = _add(Q[m], comb(j, m) * p)
    return [_to_poly(q) for q in Q]


def equation_from_spec(obj: dict) -> LinearDifferenceEquation:
    """{"coeffs": [spec | null, ...], "form": "shift" | "delta", "lagged": bool}"""
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ValueError("equation needs a 'coeffs' list")
    coeffs = [None if c is None else from_spec(c, f"$.coeffs[{i}]")
              for i, c in enumerate(obj["coeffs"])]
    form = obj.get("form", "shift")
    if form == "shift":
        return LinearDifferenceEquation(tuple(coeffs))
    if form == "delta":
        return delta_to_shift(coeffs, lagged=bool(obj.get("lagged", False)))
    raise ValueError(f"unknown equation form {form!r}")


def _profile(A: FuncExpr) -> tuple[float, int]:
    """(order, polynomial degree) of an entire coefficient in closed form."""
    if isinstance(A, Product):
        parts = [_profile(x) for x in A.factors]
        return max(o for o, _ in parts), sum(d for _, d in parts)
    if isinstance(A, ExpOf):
        pc = A.inner.poly_coeffs()
        if pc is None:
            raise ValueError("exp of a non-polynomial coefficient is not supported")
        return float(len(trim(pc)) - 1), 0
    pc = A.poly_coeffs()
    if pc is not None and A.is_entire:
        return 0.0, len(trim(pc)) - 1
    raise ValueError(f"unsupported coefficient kind {A.kind}")


def analyze_equation(eq: LinearDifferenceEquation) -> dict:
    """Lower bound for the order of any meromorphic solution, from a uniquely dominant coefficient."""
    prof = [None if A is None else _profile(A) for A in eq.coefficients]
    live = [(j, p) for j, p in enumerate(prof) if p is not None]
    top = max(o for _, (o, _) in live)
    out = {"orders": [None if p is None else p[0] for p in prof],
           "degrees": [None if p is None else p[1] for p in prof]}
    if top > 0:
        lead = [j for j, (o, _) in live if o == top]
        theorem, bound = ORDER_DOMINANCE, top + 1.0
    else:
        dmax = max(d for _, (_, d) in live)
        lead = [j for j, (_, d) in live if d == dmax]
        theorem, bound = DEGREE_DOMINANCE, 1.0
    if len(lead) != 1:
        out.update({"dominantIndex": None, "theorem": theorem, "lowerBound": NO_BOUND,
                    "reason": "no uniquely dominant coefficient"})
    else:
        out.update({"dominantIndex": lead[0], "theorem": theorem, "lowerBound": bound})
    return out


# ---------------------------------------------------------------- first-order equations

@dataclass(frozen=True)
class WhittakerSolution:
    """F(z) = e^{a z} prod Gamma(z - b_j) / prod Gamma(z - c_k)."""

    a: complex
    gammaZeros: tuple
    gammaPoles: tuple

    def expr(self) -> FuncExpr:
        num = [Shift(Gamma(), -b) for b in self.gammaZeros]
        den = [Shift(Gamma(), -c) for c in self.gammaPoles]
        if self.a != 0:
            num.insert(0, ExpOf(Poly((0, self.a))))
        top = _prod(num)
        if den:
            return Quotient(top if top is not None else Const(1), _prod(den))
        return top if top is not None else Const(1)

    def log_abs(self, z):
        return self.expr().log_abs(z)


def _prod(fs):
    if not fs:
        return None
    return fs[0] if len(fs) == 1 else Product(tuple(fs))


def _rational_parts(psi: FuncExpr):
    if isinstance(psi, Const):
        return psi.c, [], []
    if isinstance(psi, Rational):
        lead = psi.num[-1] / psi.den[-1]
        return lead, psi.zeros, psi.poles
    pc = psi.poly_coeffs()
    if pc is not None:
        c = trim(pc)
        if c.size == 1:
            return complex(c[0]), [], []
        return complex(c[-1]), roots_with_multiplicity(c), []
    raise ValueError(f"psi must be rational, got {psi.kind}")


def whittaker_solve(psi: FuncExpr) -> WhittakerSolution:
    """Meromorphic F with F(z+1) = psi(z) F(z) for rational psi."""
    C, zs, ps = _rational_parts(psi)
    if C == 0:
        raise ValueError("psi vanishes identically")
    zeros = tuple(b for b, m in zs for _ in range(m))
    poles = tuple(c for c, m in ps for _ in range(m))
    return WhittakerSolution(complex(np.log(complex(C))), zeros, poles)


def residual_check(sol: WhittakerSolution, psi: FuncExpr, samples) -> float:
    """max |log|F(z+1)| - log|F(z)| - log|psi(z)|| over the samples."""
    F = sol.expr()
    worst = 0.0
    for z in np.atleast_1d(np.asarray(samples, dtype=complex)):
        res = eval_log_abs(F, z + 1) - eval_log_abs(F, z) - eval_log_abs(psi, z)
        worst = max(worst, abs(res))
    return worst


# ---------------------------------------------------------------- rational-in-f checks

MAX_RAT_DEGREE = 3


def mohonko_check(rat: RationalInF, radii, name: str | None = None) -> Report:
    """|T(r, R(z,f)) - max(p,q) T(r,f)| <= C log r with C fitted at the smallest radius."""
    d = max(rat.p, rat.q)
    if d > MAX_RAT_DEGREE:
        raise ValueError(f"degree {d} above the supported {MAX_RAT_DEGREE}")
    f = rat.inner
    entire_only = not rat.constant_coeffs
    if entire_only and not (rat.q == 0 and f.is_entire):
        raise ValueError("non-constant coefficients are supported only for entire R(z, f)")
    radii = sorted(float(r) for r in radii if r > 1.0)
    if len(radii) < 2:
        raise ValueError("need at least two radii above 1")
    rep = Report("mohonko", name or str(rat), {"p": rat.p, "q": rat.q, "maxpq": d,
                                               "proximityOnly": entire_only})
    rows = []
    for r in radii:
        sR, sf = sample(rat, r), sample(f, r)
        rows.append((r, abs(sR.T - d * sf.T), sR.quadError + d * sf.quadError, sR.T, sf.T))
    r0, g0 = rows[0][0], rows[0][1]
    C = g0 / math.log(r0)
    rep.params["C"] = C
    for r, gap, err, TR, Tf in rows[1:]:
        rhs = C * math.log(r)
        rep.add(r, gap, rhs, slack(err, rhs) + 1e-12 * max(1.0, TR), TR=TR, Tf=Tf,
                ratio=TR / Tf if Tf > 0 else None)
    return rep.finish()


@dataclass(frozen=True)
class ShiftEquation:
    """sum_j y(z + c_j) = R(z, y)  (or prod_j y(z + c_j) with ``product``)."""

    shifts: tuple
    a: tuple
    b: tuple
    product: bool = False

    def rhs(self, f: FuncExpr) -> RationalInF:
        return RationalInF(self.a, self.b, f)

    @property
    def n(self) -> int:
        return len(self.shifts)

    def lhs_value(self, f: FuncExpr, z):
        vals = [f.value(z + c) for c in self.shifts]
        return np.prod(vals, axis=0) if self.product else np.sum(vals, axis=0)


_FIXTURE_POINTS = np.array([0.31 + 0.17j, -0.43 + 0.29j, 0.77 - 0.61j, -1.13 - 0.37j,
                            1.21 + 0.83j, 0.05 - 1.27j, -0.67 + 1.09j, 1.49 - 0.11j])


def fixture_residual(eq: ShiftEquation, f: FuncExpr, points=_FIXTURE_POINTS) -> float:
    """Worst relative mismatch between the two sides at a few generic points."""
    lhs = eq.lhs_value(f, points)
    rhs = eq.rhs(f).value(points)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs) + np.abs(rhs))))


def ahh_degree_check(eq: ShiftEquation, f: FuncExpr, radii, epsilon: float = DEFAULT_EPSILON,
                     order: float | None = None, name: str | None = None) -> Report:
    """Reproduce max{p,q} T(r,f) = T(r,R(z,f)) + S <= n T(r,f) + O(r^(s-1+eps)) + O(log r)."""
    res = fixture_residual(eq, f)
    if not res <= 1e-9:
        raise ValueError(f"candidate does not satisfy the equation (residual {res:.3g})")
    R = eq.rhs(f)
    d, n = max(R.p, R.q), eq.n
    sigma = float(order) if order is not None else f.order
    if sigma is None:
        raise ValueError("the order of f is needed (pass order=...)")
    radii = sorted(float(r) for r in radii if r > 1.0)
    if len(radii) < 2:
        raise ValueError("need at least two radii above 1")
    rep = Report("ahh-degree", name or str(f),
                 {"p": R.p, "q": R.q, "maxpq": d, "n": n, "order": sigma, "epsilon": epsilon,
                  "product": eq.product, "fixtureResidual": res})
    power = sigma - 1.0 + epsilon

    def err_term(r):
        return r ** power + math.log(r)

    rows = []
    for r in radii:
        sf, sR = sample(f, r), sample(R, r)
        rows.append((r, sf, sR))
    r0, sf0, sR0 = rows[0]
    C_moh = abs(sR0.T - d * sf0.T) / math.log(r0)
    C_sum = max(0.0, sR0.T - n * sf0.T) / err_term(r0)
    C_deg = max(0.0, d * sf0.T - n * sf0.T) / err_term(r0)
    rep.params.update({"Cmohonko": C_moh, "Csum": C_sum, "Cdegree": C_deg})
    for r, sf, sR in rows[1:]:
        e = sf.quadError * max(d, n) + sR.quadError
        lhs, rhs = abs(sR.T - d * sf.T), C_moh * math.log(r)
        rep.add(r, lhs, rhs, slack(e, rhs), step="mohonko", Tf=sf.T, TR=sR.T)
        lhs, rhs = sR.T, n * sf.T + C_sum * err_term(r)
        rep.add(r, lhs, rhs, slack(e, rhs), step="shift-sum")
        lhs, rhs = d * sf.T, n * sf.T + C_deg * err_term(r)
        rep.add(r, lhs, rhs, slack(e, rhs), step="degree")
    if d > n:
        rep.notes.append(f"max(p,q) = {d} exceeds n = {n}")
        return rep.finish(FAIL)
    return rep.finish()
