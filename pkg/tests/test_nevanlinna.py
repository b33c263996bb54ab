import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from oracles import mp_log_abs

from nevlab.funcalg import Const, ExpOf, Gamma, Poly, Quotient, Rational, Shift, Z
from nevlab.nevanlinna import (DivisorOnCircleError, characteristic_curve, circle_mean,
                               clear_radius, counting, log_radii, poisson_jensen_reconstruct,
                               proximity, sample, unintegrated_counting)


def test_proximity_of_z():
    assert proximity(Z, 10).value == pytest.approx(math.log(10), abs=1e-10)


def test_proximity_of_exp():
    # m(r, e^z) = r / pi
    assert proximity(ExpOf(Z), math.pi).value == pytest.approx(1.0, rel=1e-9)


def test_gamma_quotient_proximity():
    q = Quotient(Shift(Gamma(), 1), Gamma())
    for r in (10, 50):
        m = proximity(q, r)
        assert m.value == pytest.approx(math.log(r), abs=max(1e-6, 3 * m.quadError))


def test_counting_examples():
    f = Rational.from_roots([], [1, 2])
    assert counting(f, 4) == pytest.approx(math.log(4) + math.log(2), abs=1e-14)
    expected = 2 * math.log(3.5) + math.log(1.75) + math.log(3.5 / 3)
    assert counting(Gamma(), 3.5) == pytest.approx(expected, abs=1e-13)


def test_counting_origin_term():
    f = Rational.from_roots([], [0, 0])
    assert counting(f, 5) == pytest.approx(2 * math.log(5))


def test_unintegrated_counting():
    assert unintegrated_counting(Gamma(), 3.5) == (4, 0)
    assert unintegrated_counting(Rational.from_roots([1], [2]), 3) == (1, 1)


def test_exp_curve_and_constant():
    curve = characteristic_curve(ExpOf(Z), [1, 2, 3], threads=1)
    assert np.allclose(curve.T, np.array([1, 2, 3]) / math.pi, rtol=1e-9)
    c = characteristic_curve(Const(5), log_radii(1, 100, 4), threads=1)
    assert np.allclose(c.T, math.log(5), atol=1e-12)
    assert np.allclose(c.N, 0)


def test_threads_do_not_change_values():
    radii = log_radii(2, 50, 4)
    a = characteristic_curve(Gamma(), radii, threads=1)
    b = characteristic_curve(Gamma(), radii, threads=4)
    assert a.to_csv() == b.to_csv()


def test_csv_format():
    text = characteristic_curve(ExpOf(Z), [1.0, 2.0], threads=1).to_csv()
    lines = text.splitlines()
    assert lines[0] == "r,m,N,T,quadError,nodes"
    assert len(lines) == 3
    r, m, N, T, err, nodes = lines[1].split(",")
    assert float(r) == 1.0 and float(m) + float(N) == pytest.approx(float(T))
    assert int(nodes) > 0


def test_radius_nudged_off_divisor():
    assert clear_radius(Gamma(), 3.0) > 3.0
    s = sample(Gamma(), 3.0)
    assert s.requested == 3.0 and s.r == pytest.approx(3.0, rel=1e-5)
    curve = characteristic_curve(Gamma(), [2.5, 3.0], threads=1)
    assert curve.nudges and curve.nudges[0][0] == 3.0


def test_divisor_on_circle_rejected():
    with pytest.raises(DivisorOnCircleError):
        circle_mean(Gamma(), 2.0)
    with pytest.raises(DivisorOnCircleError):
        poisson_jensen_reconstruct(Rational.from_roots([2j], []), 2.0, [0.1])


def test_poles_near_circle():
    # poles 1e-4 off the contour: subtraction keeps the mean accurate
    f = Rational.from_roots([], [1.0001, -0.9999j])
    m = circle_mean(f, 1.0, "log")
    exact = -math.log(1.0001)  # mean of log|z - d| is log max(r, |d|)
    assert m.value == pytest.approx(exact, abs=1e-9)


def test_jensen_formula():
    # mean of log|f| = log|f(0)| + sum log(r/|a|) over zeros - same over poles
    f = Rational.from_roots([0.5 + 0.5j, -2], [1j * 0.3, 3], lead=2)
    r = 2.5
    lhs = circle_mean(f, r, "log").value
    rhs = math.log(abs(f.value(np.array([0j]))[0])) + math.log(r / abs(0.5 + 0.5j)) \
        + math.log(r / 2) - math.log(r / 0.3)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_first_main_theorem_for_reciprocal():
    # T(r, f) - T(r, 1/f) = log|f(0)|
    f = Rational.from_roots([1, 2j], [0.5j], lead=3)
    g = Rational(f.den, f.num)
    r = 4.0
    assert sample(f, r).T - sample(g, r).T == pytest.approx(math.log(abs(f.value(np.array([0j]))[0])),
                                                            abs=1e-9)


@pytest.mark.parametrize("f,R,z,expected", [
    (Rational.from_roots([1], [2]), 3.0, 0.5, math.log(1 / 3)),
    (Poly((0, 1)), 2.0, 1j, 0.0),
    (ExpOf(Z), 5.0, 1 + 1j, 1.0),
])
def test_poisson_jensen_examples(f, R, z, expected):
    assert poisson_jensen_reconstruct(f, R, z) == pytest.approx(expected, abs=1e-9)


root = st.builds(complex, st.floats(-4, 4), st.floats(-4, 4))


@settings(max_examples=30)
@given(st.lists(root, max_size=3), st.lists(root, max_size=3), st.floats(1.5, 5),
       st.lists(st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi)), min_size=1, max_size=5))
def test_poisson_jensen_property(zeros, poles, R, polar):
    pts = zeros + poles
    assume(all(abs(a - b) > 0.05 for i, a in enumerate(pts) for b in pts[i + 1:]))
    assume(all(abs(abs(p) - R) > 1e-3 for p in pts))
    f = Rational.from_roots(zeros, poles)
    z = np.array([rho * R * complex(math.cos(t), math.sin(t)) for rho, t in polar])
    assume(all(abs(p - w) > 1e-3 for p in pts for w in z))
    got = poisson_jensen_reconstruct(f, R, z)
    ref = np.array([mp_log_abs(f, w) for w in z])
    assert np.all(np.abs(got - ref) <= 1e-7 * (1 + np.abs(ref)))


@settings(max_examples=20)
@given(st.lists(root, max_size=4), st.lists(root, min_size=1, max_size=4), st.floats(1, 6))
def test_counting_inequalities(zeros, poles, r):
    pts = zeros + poles
    assume(all(abs(a - b) > 0.05 for i, a in enumerate(pts) for b in pts[i + 1:]))
    assume(all(abs(abs(p) - r) > 1e-3 for p in pts))
    f = Rational.from_roots(zeros, poles)
    n_poles, _ = unintegrated_counting(f, r)
    # N(er) >= n(r) for the integrated count
    assert counting(f, math.e * r) >= n_poles - 1e-12
    assert counting(f, 2 * r) >= counting(f, r) - 1e-12


@settings(max_examples=15)
@given(st.lists(root, max_size=3), st.lists(root, max_size=3), st.lists(root, max_size=3),
       st.floats(1.2, 6))
def test_characteristic_subadditive(z1, p1, p2, r):
    pts = z1 + p1 + p2
    assume(all(abs(a - b) > 0.05 for i, a in enumerate(pts) for b in pts[i + 1:]))
    assume(all(abs(abs(p) - r) > 1e-3 for p in pts))
    f, g = Rational.from_roots(z1, p1), Rational.from_roots([], p2)
    from nevlab.funcalg import Product
    sf, sg, sp = sample(f, r), sample(g, r), sample(Product((f, g)), r)
    tol = 3 * (sf.quadError + sg.quadError + sp.quadError) + 1e-10
    assert sp.T <= sf.T + sg.T + tol


def test_characteristic_is_monotone():
    curve = characteristic_curve(Gamma(), log_radii(1.1, 60, 8), threads=1)
    assert curve.is_monotone()
