"""Command-line front end.

Exit status: 0 when every check passes (or is inconclusive), 2 when a bound
check fails, 1 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import cartan, diffeq, growth
from .funcalg import (Const, ExpOf, FuncAlgError, Poly, Rational, RationalInF, SpecError, load)
from .funcalg.specjson import parse_complex
from .nevanlinna import characteristic_curve, log_radii
from .report import FAIL, PASS, Report, _clean

THEOREMS = ("char-shift", "counting-shift", "quotient-proximity", "fund-est", "pointwise",
            "counterexample", "mohonko", "ahh-degree", "cartan-lemma", "lemma-calpha",
            "lemma-circle-average")

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


class InputError(Exception):
    pass


def write_atomic(path: str | None, text: str):
    """Write text to path via a temp file and rename; stdout when path is None."""
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".nevlab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_complex_arg(v) -> complex:
    """Complex from a number, an [re, im] pair, or a string such as '1', '1+2j' or '[1, 0]'."""
    if isinstance(v, str):
        t = v.strip()
        if t.startswith("["):
            return parse_complex(json.loads(t))
        try:
            return complex(t.replace(" ", "").replace("i", "j"))
        except ValueError as exc:
            raise InputError(f"not a complex number: {v!r}") from exc
    return parse_complex(v)


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def _radii(args) -> np.ndarray:
    if args.rmin < 0.5:
        raise InputError("--rmin must be at least 0.5")
    if not args.rmax > args.rmin:
        raise InputError("--rmax must exceed --rmin")
    if args.per_decade < 4:
        raise InputError("--per-decade must be at least 4")
    return log_radii(args.rmin, args.rmax, args.per_decade)


def _function(args, required=True):
    if args.function is None:
        if required:
            raise InputError("--function is required")
        return None
    return load(args.function)


def _load_json(text: str):
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    return json.loads(text)


# ---------------------------------------------------------------- commands

def cmd_characteristic(args) -> int:
    f = _function(args)
    curve = characteristic_curve(f, _radii(args))
    write_atomic(args.output, curve.to_csv())
    for req, got in curve.nudges:
        print(f"note: radius {req:.17g} moved to {got:.17g} to avoid a divisor point",
              file=sys.stderr)
    return EXIT_OK


def cmd_order(args) -> int:
    f = _function(args)
    curve = characteristic_curve(f, _radii(args))
    est = growth.estimate_order(curve, f)
    out = {"function": str(f), "order": est.order, "fitWindow": list(est.fitWindow),
           "residual": est.residual, "method": est.method, "fitted": est.fitted}
    write_atomic(args.output, _json(_clean(out)))
    return EXIT_OK


def _lemma_calpha(args) -> Report:
    rng = np.random.default_rng(args.seed)
    rep = Report("lemma-calpha", "log(1+x) <= C_a x^a", {"seed": args.seed, "draws": args.trials})
    rep.params["cOne"] = growth.c_alpha(1.0)
    for a in (0.25, 0.5, 0.75, 1.0):
        c = growth.c_alpha(a)
        x = np.exp(rng.uniform(math.log(1e-8), math.log(1e8), args.trials))
        gap = c * x ** a - np.log1p(x)
        i = int(np.argmin(gap))
        rep.add(a, float(np.log1p(x[i])), float(c * x[i] ** a),
                growth.ROUND_SLACK * max(1.0, float(c * x[i] ** a)), C=c)
    rep.finish()
    if rep.params["cOne"] != 1.0:
        rep.verdict = FAIL
    return rep


def _lemma_circle_average(args) -> Report:
    rng = np.random.default_rng(args.seed)
    rep = Report("lemma-circle-average", "mean |re^{it}-w|^-a <= 1/((1-a) r^a)",
                 {"seed": args.seed, "draws": args.trials})
    for _ in range(args.trials):
        r = float(np.exp(rng.uniform(-2, 4)))
        a = float(rng.uniform(0.05, 0.95))
        w = complex(r * np.exp(rng.uniform(-3, 1)) * np.exp(2j * np.pi * rng.uniform()))
        if abs(abs(w) - r) <= 1e-9 * r:
            continue
        chk = growth.circle_average_bound_check(w, r, a)
        rep.add(r, chk.lhs, chk.rhs, growth.slack(chk.quadError, chk.rhs), alpha=a, w=w)
    return rep.finish()


def _cartan_lemma(args) -> Report:
    rng = np.random.default_rng(args.seed)
    rep = Report("cartan-lemma", "random point sets",
                 {"seed": args.seed, "trials": args.trials, "outsideSamples": args.samples})
    for t in range(args.trials):
        p = int(rng.integers(1, args.max_points + 1))
        pts = rng.normal(size=p) + 1j * rng.normal(size=p)
        B = float(rng.uniform(0.01, 3.0))
        es = cartan.cartan_disks(pts, B)
        z = _outside_samples(rng, es, args.samples)
        bad = int(np.sum(~cartan.sorted_distance_ok(pts, z, B)))
        total = es.total_radius()
        rep.add(t, abs(total - 2 * B), 1e-12 * max(1.0, 2 * B), points=p, disks=len(es.disks),
                outside=int(z.size), violations=bad)
        if bad:
            rep.samples[-1]["margin"] = -math.inf
    return rep.finish()


def _outside_samples(rng, es, n):
    """Points outside the disks, half of them hugging the disk boundaries."""
    c, rad = es.centers, es.radii
    span = float(np.max(np.abs(c)) + np.max(rad)) + 1.0
    out = []
    while sum(len(x) for x in out) < n:
        k = n
        far = span * (rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k))
        i = rng.integers(0, c.size, k)
        near = c[i] + rad[i] * (1 + rng.uniform(1e-9, 0.2, k)) * np.exp(2j * np.pi * rng.uniform(size=k))
        z = np.concatenate([far[: k // 2], near[: k - k // 2]])
        out.append(z[~es.contains(z)])
    return np.concatenate(out)[:n]


AHH_FIXTURES = {
    "exp-pi": (lambda: (diffeq.ShiftEquation((1, -1), ((0,), (-2,)), ((1,),)),
                        ExpOf(Poly((0, 1j * math.pi)))), "f(z+1)+f(z-1) = -2f, f = exp(i pi z)"),
    "square": (lambda: (diffeq.ShiftEquation((1, -1), ((2,), (2,)), ((1,),)), Poly((0, 0, 1))),
               "f(z+1)+f(z-1) = 2f+2, f = z^2"),
    "tan": (lambda: (diffeq.ShiftEquation((1, -1), ((-2,),), ((0,), (1,))),
                     RationalInF(((1j,), (-1j,)), ((1,), (1,)), ExpOf(Poly((0, 1j * math.pi))))),
            "f(z+1)+f(z-1) = -2/f, f = tan(pi z/2)"),
    "product-exp": (lambda: (diffeq.ShiftEquation((1, -1), ((0,), (0,), (math.e ** 2,)), ((1,),),
                                                  product=True), ExpOf(Poly((0, 0, 1)))),
                    "f(z+1)f(z-1) = e^2 f^2, f = exp(z^2)"),
}


def _ahh(args, radii) -> Report:
    if args.fixture:
        eq, f = AHH_FIXTURES[args.fixture][0]()
        name = AHH_FIXTURES[args.fixture][1]
    else:
        if args.equation is None:
            raise InputError("ahh-degree needs --fixture or --equation with --function")
        obj = _load_json(args.equation)
        try:
            eq = diffeq.ShiftEquation(tuple(parse_complex_arg(c) for c in obj["shifts"]),
                                      tuple(tuple(parse_complex_arg(x) for x in c) for c in obj["a"]),
                                      tuple(tuple(parse_complex_arg(x) for x in c) for c in obj["b"]),
                                      bool(obj.get("product", False)))
        except (KeyError, TypeError) as exc:
            raise InputError(f"equation needs shifts, a and b: {exc}") from exc
        f = _function(args)
        name = None
    return diffeq.ahh_degree_check(eq, f, radii, args.epsilon, name=name)


def cmd_verify(args) -> int:
    th = args.theorem
    eta = parse_complex_arg(args.eta)
    if th == "counterexample":
        rep = growth.infinite_order_counterexample(args.rmax, args.n_radii)
    elif th == "lemma-calpha":
        rep = _lemma_calpha(args)
    elif th == "lemma-circle-average":
        rep = _lemma_circle_average(args)
    elif th == "cartan-lemma":
        rep = _cartan_lemma(args)
    elif th == "ahh-degree":
        rep = _ahh(args, _radii(args))
    else:
        f = _function(args)
        radii = _radii(args)
        if th == "char-shift":
            rep = growth.verify_shift_characteristic(f, eta, radii, args.epsilon)
        elif th == "counting-shift":
            rep = growth.verify_shift_counting(f, eta, radii, args.epsilon)
        elif th == "quotient-proximity":
            rep = growth.verify_quotient_proximity(f, eta, radii, args.epsilon)
        elif th == "fund-est":
            rep = growth.verify_fund_est(f, eta, radii, args.alpha)
        elif th == "pointwise":
            rep = cartan.pointwise_quotient_check(f, eta, args.gamma, radii, args.epsilon)
        elif th == "mohonko":
            if not isinstance(f, RationalInF):
                raise InputError("mohonko needs a ratinf function spec")
            rep = diffeq.mohonko_check(f, radii)
        else:  # pragma: no cover - argparse restricts the choices
            raise InputError(f"unknown theorem {th}")
    write_atomic(args.output, rep.to_json())
    if rep.verdict != PASS:
        print(f"verdict: {rep.verdict}", file=sys.stderr)
    return EXIT_FAIL if rep.verdict == FAIL else EXIT_OK


def parse_psi(text: str):
    """Rational function of z from a string, e.g. '3*(z-1)/(z+2)'."""
    import sympy
    z = sympy.Symbol("z")
    try:
        expr = sympy.sympify(text, locals={"z": z, "I": sympy.I, "i": sympy.I})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise InputError(f"cannot parse psi {text!r}: {exc}") from exc
    if expr.free_symbols - {z}:
        raise InputError(f"psi may only use the variable z, got {sorted(map(str, expr.free_symbols))}")
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    if not (num.is_polynomial(z) and den.is_polynomial(z)):
        raise InputError("psi must be a rational function of z")
    nc = [complex(c) for c in reversed(sympy.Poly(num, z).all_coeffs())]
    dc = [complex(c) for c in reversed(sympy.Poly(den, z).all_coeffs())]
    if all(c == 0 for c in nc):
        raise InputError("psi vanishes identically")
    if len(nc) == 1 and len(dc) == 1:
        return Const(nc[0] / dc[0])
    if len(dc) == 1:
        return Poly(tuple(c / dc[0] for c in nc))
    return Rational(tuple(nc), tuple(dc))


def _whittaker_samples(rng, sol, n, radius=20.0, keep=0.05):
    """Uniform samples in |z| < radius away from every lattice b - k (k >= -1)."""
    bases = np.array(list(sol.gammaZeros) + list(sol.gammaPoles), dtype=complex)
    out = []
    while len(out) < n:
        z = radius * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if bases.size:
            w = bases - z  # z = b - k  <=>  w = k
            k = np.round(w.real)
            near = (np.abs(w - k) < keep) & (k >= -1)
            if np.any(near):
                continue
        out.append(z)
    return np.array(out)


def cmd_whittaker(args) -> int:
    psi = parse_psi(args.psi)
    sol = diffeq.whittaker_solve(psi)
    out = {"psi": args.psi, "a": [sol.a.real, sol.a.imag],
           "zeros": [[b.real, b.imag] for b in sol.gammaZeros],
           "poles": [[c.real, c.imag] for c in sol.gammaPoles]}
    code = EXIT_OK
    if args.check_samples:
        rng = np.random.default_rng(args.seed)
        res = diffeq.residual_check(sol, psi, _whittaker_samples(rng, sol, args.check_samples))
        out.update({"samples": args.check_samples, "residual": res, "tolerance": args.tolerance,
                    "verdict": PASS if res <= args.tolerance else FAIL})
        if res > args.tolerance:
            code = EXIT_FAIL
    write_atomic(args.output, _json(out))
    return code


def cmd_analyze(args) -> int:
    eq = diffeq.equation_from_spec(_load_json(args.equation))
    out = diffeq.analyze_equation(eq)
    out["shiftDegrees"] = eq.degrees()
    write_atomic(args.output, _json(out))
    return EXIT_OK


def cmd_cartan(args) -> int:
    if args.points is not None:
        raw = _load_json(args.points)
        pts = [parse_complex_arg(p) for p in raw]
    else:
        f = _function(args)
        pts = []
        for c, k in f.divisor(args.rmax).entries:
            pts += [c] * abs(k)
    if not pts:
        raise InputError("no points to cover")
    if not args.B > 0:
        raise InputError("--B must be positive")
    es = cartan.cartan_disks(pts, args.B)
    d = es.to_dict()
    d["intervals"] = [list(iv) for iv in cartan.project_radii(es).intervals]
    write_atomic(args.output, _json(d))
    return EXIT_OK


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse would exit 2, which means "check failed" here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nevlab", description="Numerical Nevanlinna theory toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, function=True, radii=True):
        if function:
            sp.add_argument("--function", "-f", help="function spec: JSON file or inline JSON")
        if radii:
            sp.add_argument("--rmin", type=float, default=10.0)
            sp.add_argument("--rmax", type=float, default=100.0)
            sp.add_argument("--per-decade", type=int, default=24)
        sp.add_argument("--output", "-o", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("characteristic", help="CSV of m, N, T on log-spaced radii")
    common(sp)
    sp.set_defaults(run=cmd_characteristic)

    sp = sub.add_parser("order", help="estimate the order of growth")
    common(sp)
    sp.set_defaults(run=cmd_order)

    sp = sub.add_parser("verify", help="run a named bound check")
    common(sp)
    sp.add_argument("--theorem", required=True, choices=THEOREMS)
    sp.add_argument("--eta", default="1")
    sp.add_argument("--epsilon", type=float, default=growth.DEFAULT_EPSILON)
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--gamma", type=float, default=2.0)
    sp.add_argument("--n-radii", type=int, default=50)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--max-points", type=int, default=50)
    sp.add_argument("--fixture", choices=sorted(AHH_FIXTURES))
    sp.add_argument("--equation", help="shift equation JSON {shifts, a, b, product}")
    sp.set_defaults(run=cmd_verify)

    sp = sub.add_parser("whittaker", help="solve F(z+1) = psi(z) F(z) for rational psi")
    common(sp, function=False, radii=False)
    sp.add_argument("--psi", required=True, help="rational function of z, e.g. '3*(z-1)/(z+2)'")
    sp.add_argument("--check-samples", type=int, default=0)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.set_defaults(run=cmd_whittaker)

    sp = sub.add_parser("analyze-eq", help="order lower bound for a linear difference equation")
    common(sp, function=False, radii=False)
    sp.add_argument("--equation", required=True, help="equation JSON {coeffs, form}")
    sp.set_defaults(run=cmd_analyze)

    sp = sub.add_parser("cartan", help="exclusion disks for a point set or a divisor")
    common(sp, radii=False)
    sp.add_argument("--points", help="JSON list of [re, im] points (file or inline)")
    sp.add_argument("--rmax", type=float, default=100.0, help="divisor radius with --function")
    sp.add_argument("--B", type=float, default=1.0)
    sp.set_defaults(run=cmd_cartan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = args.run(args)
    except SpecError as exc:
        print(f"error: malformed function spec: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, FuncAlgError, ValueError, NotImplementedError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if os.environ.get("NEVLAB_TIMING"):
        print(f"elapsed {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
