import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nevlab import diffeq
from nevlab.diffeq import (DEGREE_DOMINANCE, NO_BOUND, ORDER_DOMINANCE, LinearDifferenceEquation,
                           ShiftEquation, WhittakerSolution, ahh_degree_check, analyze_equation,
                           delta_to_shift, equation_from_spec, mohonko_check, residual_check,
                           shift_to_delta, whittaker_solve)
from nevlab.funcalg import (Const, ExpOf, Gamma, HaymanThatcher, Poly, Rational, RationalInF,
                            Z, loggamma)
from nevlab.growth import estimate_order, estimate_pole_exponent
from nevlab.nevanlinna import characteristic_curve, log_radii
from nevlab.report import FAIL, PASS


def _coeffs(p):
    return None if p is None else list(np.round(np.asarray(p.coeffs), 12))


# ---------------------------------------------------------------- equations


def test_delta_examples():
    eq = delta_to_shift([None, Poly((1,))])
    assert [_coeffs(p) for p in eq.coefficients] == [[-1], [1]]
    eq = delta_to_shift([None, None, Poly((1,))])
    assert [_coeffs(p) for p in eq.coefficients] == [[1], [-2], [1]]


def _iy():
    # z(z-1)(z-2) D^3 f(z-3) + z(z-1) D^2 f(z-2) + z D f(z-1) + (z+1) f(z) = 0
    return delta_to_shift([Poly((1, 1)), Poly((0, 1)), Poly((0, -1, 1)), Poly((0, 2, -3, 1))],
                          lagged=True)


def test_ishizaki_yanagihara_degrees():
    eq = _iy()
    assert eq.degrees() == [3, 3, 3, 3]
    v = analyze_equation(eq)
    assert v["lowerBound"] == NO_BOUND and v["dominantIndex"] is None
    assert v["theorem"] == DEGREE_DOMINANCE


def test_lagged_conversion_matches_direct_evaluation():
    # both forms vanish on the same f: compare residual operators on a test function
    eq = _iy()
    f = ExpOf(Poly((0, 0.3 + 0.1j)))
    z = np.array([0.4 + 0.2j, 2.5 - 1j, -1.3 + 0.7j])
    zz = z + 3  # the shift form has base point z - 3 moved to z

    def D(k, w):
        return sum(math.comb(k, i) * (-1) ** (k - i) * f.value(w + i) for i in range(k + 1))

    direct = ((zz * (zz - 1) * (zz - 2)) * D(3, zz - 3) + zz * (zz - 1) * D(2, zz - 2)
              + zz * D(1, zz - 1) + (zz + 1) * f.value(zz))
    assert np.allclose(eq.residual(f, z), direct, rtol=1e-12, atol=1e-12)


def test_gamma_equation_bound():
    eq = LinearDifferenceEquation((Poly((0, -1)), Poly((1,))))  # F(z+1) - z F(z)
    v = analyze_equation(eq)
    assert v == {"orders": [0.0, 0.0], "degrees": [1, 0], "dominantIndex": 0,
                 "theorem": DEGREE_DOMINANCE, "lowerBound": 1.0}
    z = np.array([0.5 + 0.3j, 2.2 - 1j])
    assert np.allclose(eq.residual(Gamma(), z), 0, atol=1e-12)


def test_entire_coefficient_bound():
    eq = LinearDifferenceEquation((ExpOf(Z), ExpOf(Poly((0, 0, 1)))))
    v = analyze_equation(eq)
    assert v["dominantIndex"] == 1 and v["theorem"] == ORDER_DOMINANCE and v["lowerBound"] == 3.0


def test_tied_orders_give_no_bound():
    eq = LinearDifferenceEquation((ExpOf(Poly((0, 0, 2))), Poly((1, 1)), ExpOf(Poly((0, 0, 1)))))
    assert analyze_equation(eq)["lowerBound"] == NO_BOUND


def test_unsupported_coefficient():
    with pytest.raises(ValueError):
        analyze_equation(LinearDifferenceEquation((Gamma(), Poly((1,)))))


def test_zero_end_coefficient_rejected():
    with pytest.raises(ValueError):
        LinearDifferenceEquation((None, Poly((1,))))


def test_equation_from_spec():
    eq = equation_from_spec({"coeffs": [{"kind": "poly", "coeffs": [0, -1]},
                                        {"kind": "const", "c": 1}], "form": "shift"})
    assert analyze_equation(eq)["lowerBound"] == 1.0
    eq = equation_from_spec({"coeffs": [None, {"kind": "const", "c": 1}], "form": "delta"})
    assert [_coeffs(p) for p in eq.coefficients] == [[-1], [1]]
    with pytest.raises(ValueError):
        equation_from_spec({"coeffs": [], "form": "weird"})


poly = st.lists(st.integers(-5, 5), min_size=1, max_size=6).map(lambda c: Poly(tuple(c)) if any(c) else None)


@settings(max_examples=60)
@given(st.lists(poly, min_size=2, max_size=5))
def test_round_trip(ps):
    assume(ps[0] is not None and ps[-1] is not None)
    eq = LinearDifferenceEquation(tuple(ps))
    back = delta_to_shift(shift_to_delta(eq))
    for a, b in zip(eq.coefficients, back.coefficients):
        assert (a is None) == (b is None)
        if a is not None:
            assert np.allclose(np.asarray(a.coeffs), np.asarray(b.coeffs))


@settings(max_examples=40)
@given(st.lists(poly, min_size=2, max_size=5), st.complex_numbers(min_magnitude=0.1, max_magnitude=10,
                                                                  allow_nan=False, allow_infinity=False))
def test_scale_invariance(ps, c):
    assume(ps[0] is not None and ps[-1] is not None)
    eq = LinearDifferenceEquation(tuple(ps))
    scaled = LinearDifferenceEquation(tuple(None if p is None else Poly(tuple(c * x for x in p.coeffs))
                                            for p in ps))
    a, b = analyze_equation(eq), analyze_equation(scaled)
    assert (a["dominantIndex"], a["lowerBound"]) == (b["dominantIndex"], b["lowerBound"])


# ---------------------------------------------------------------- first-order equations


def test_whittaker_gamma():
    sol = whittaker_solve(Z)
    assert sol.a == 0 and sol.gammaZeros == (0j,) and sol.gammaPoles == ()
    assert sol.log_abs(np.array([3.5]))[0] - sol.log_abs(np.array([2.5]))[0] == pytest.approx(math.log(2.5))


def test_whittaker_constant():
    sol = whittaker_solve(Const(2))
    assert sol.a == pytest.approx(math.log(2))
    assert residual_check(sol, Const(2), [0.3, 1 + 2j]) <= 1e-14
    one = whittaker_solve(Const(1))
    assert residual_check(one, Const(1), [0.3, 5j]) == 0.0


def test_whittaker_rational_example():
    psi = Rational.from_roots([1], [-2], lead=3)
    sol = whittaker_solve(psi)
    assert sol.a == pytest.approx(math.log(3))
    z = 1.5
    ratio = math.exp(sol.log_abs(np.array([z + 1]))[0] - sol.log_abs(np.array([z]))[0])
    assert ratio == pytest.approx(3 / 7, rel=1e-12)
    # against the lgamma oracle directly
    ref = 3 ** 1.5 * math.gamma(0.5) / math.gamma(3.5)
    assert math.exp(sol.log_abs(np.array([z]))[0]) == pytest.approx(abs(ref), rel=1e-12)


def test_whittaker_detects_wrong_solution():
    sol = whittaker_solve(Z)
    bad = WhittakerSolution(sol.a + 0.1, sol.gammaZeros, sol.gammaPoles)
    z = np.linspace(0.3, 9.7, 20)
    assert residual_check(sol, Z, z) <= 1e-12
    assert residual_check(bad, Z, z) >= 0.09


def test_whittaker_rejects_transcendental():
    with pytest.raises(ValueError):
        whittaker_solve(ExpOf(Z))


def _samples(sol, rng, n):
    lattice = [b - k for b in sol.gammaZeros + sol.gammaPoles for k in range(-2, 25)]
    out = []
    while len(out) < n:
        z = complex(rng.uniform(-14, 14), rng.uniform(-14, 14))
        if abs(z) < 20 and all(abs(z - p) > 0.05 and abs(z + 1 - p) > 0.05 for p in lattice):
            out.append(z)
    return out


def test_whittaker_random_rationals():
    rng = np.random.default_rng(4)
    for _ in range(10):
        nz, np_ = rng.integers(0, 4, 2)
        pts = rng.uniform(-10, 10, nz + np_) + 1j * rng.uniform(-10, 10, nz + np_)
        if any(abs(a - b) < 0.1 for i, a in enumerate(pts) for b in pts[i + 1:]):
            continue
        lead = complex(rng.uniform(0.5, 3), rng.uniform(-1, 1))
        psi = Rational.from_roots(list(pts[:nz]), list(pts[nz:]), lead) if nz + np_ else Const(lead)
        sol = whittaker_solve(psi)
        assert residual_check(sol, psi, _samples(sol, rng, 30)) <= 1e-9


def test_order_of_built_gamma():
    F = whittaker_solve(Z).expr()
    curve = characteristic_curve(F, log_radii(10, 1000, 8))
    assert estimate_order(curve).fitted == pytest.approx(1.0, abs=0.15)
    assert estimate_order(curve, Gamma()).order == 1.0


def test_hayman_thatcher_fixture():
    F = HaymanThatcher(math.e)
    rng = np.random.default_rng(8)
    z = rng.uniform(-20, 100, 50) + 1j * rng.uniform(-6, 6, 50)
    res = np.abs(F.log_abs(z) - np.log(np.abs(1 + np.exp(z))) - F.log_abs(z + 1))
    assert np.all(res <= F.tail_bound(z) + F.tail_bound(z + 1) + F.rounding_bound(z) + F.rounding_bound(z + 1))
    est = estimate_pole_exponent(F.divisor(80), log_radii(10, 80, 8))
    assert est.exponent == pytest.approx(2.0, abs=0.1)


# ---------------------------------------------------------------- rational right sides


def test_mohonko_square():
    rep = mohonko_check(RationalInF(((0,), (0,), (1,)), ((1,),), ExpOf(Z)), [10, 20, 40])
    assert rep.verdict == PASS
    assert all(s["ratio"] == pytest.approx(2.0, rel=1e-8) for s in rep.samples)


def test_mohonko_with_poles():
    rat = RationalInF(((0,), (0,), (1,)), ((1,), (1,)), ExpOf(Z))  # f^2 / (1 + f)
    rep = mohonko_check(rat, log_radii(10, 100, 4))
    assert rep.verdict == PASS, rep.to_json()
    assert rep.params["maxpq"] == 2


def test_mohonko_moebius():
    rat = RationalInF(((1,), (1,)), ((-1,), (1,)), ExpOf(Z))  # (f + 1) / (f - 1)
    rep = mohonko_check(rat, log_radii(10, 100, 4))
    assert rep.verdict == PASS
    assert rep.samples[-1]["ratio"] == pytest.approx(1.0, abs=0.05)


def test_mohonko_limits():
    with pytest.raises(ValueError):
        mohonko_check(RationalInF(((0,),) * 4 + ((1,),), ((1,),), ExpOf(Z)), [10, 20])


@pytest.mark.parametrize("key", ["exp-pi", "square", "tan", "product-exp"])
def test_ahh_fixtures(key):
    from nevlab.cli import AHH_FIXTURES
    eq, f = AHH_FIXTURES[key][0]()
    rep = ahh_degree_check(eq, f, log_radii(5, 40, 4), order=None if f.order is not None else 1.0)
    assert rep.verdict == PASS, rep.to_json()
    assert rep.params["fixtureResidual"] <= 1e-9


def test_ahh_rejects_non_solution():
    eq = ShiftEquation((1, -1), ((0,), (3,)), ((1,),))
    with pytest.raises(ValueError):
        ahh_degree_check(eq, ExpOf(Poly((0, 1j * math.pi))), [5, 10])


def test_ahh_flags_degree_excess(monkeypatch):
    # y(z+1) = y^3 has no fixture here; bypass the residual gate to exercise the verdict
    eq = ShiftEquation((1,), ((0,), (0,), (0,), (1,)), ((1,),))
    monkeypatch.setattr(diffeq, "fixture_residual", lambda *a, **k: 0.0)
    assert ahh_degree_check(eq, ExpOf(Z), [5, 10, 20]).verdict == FAIL
