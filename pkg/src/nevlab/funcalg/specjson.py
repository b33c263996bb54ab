"""JSON description language for expression trees.

Each node is an object with a ``kind`` field; complex numbers are ``[re, im]``
pairs (plain numbers are accepted for real values)::

    {"kind": "shift", "eta": [1, 0], "inner": {"kind": "gamma"}}

Errors name the offending node with a JSONPath-like string such as
``$.inner.factors[1]``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import SpecError
from .expr import (Const, ExpOf, FuncExpr, Gamma, HaymanThatcher, HyperbolicGamma, Poly,
                   Power, Product, Quotient, Rational, RationalInF, Shift)


def parse_complex(v, path: str = "$") -> complex:
    if isinstance(v, bool):
        raise SpecError(path, "expected a number or [re, im] pair")
    if isinstance(v, (int, float)):
        z = complex(v)
    elif isinstance(v, (list, tuple)) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        z = complex(v[0], v[1])
    else:
        raise SpecError(path, "expected a number or [re, im] pair")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SpecError(path, "complex value must be finite")
    return z


def _clist(v, path):
    if not isinstance(v, list) or not v:
        raise SpecError(path, "expected a non-empty list of numbers")
    return [parse_complex(x, f"{path}[{i}]") for i, x in enumerate(v)]


def _real(v, path, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(path, "expected a finite real number")
    if positive and v <= 0:
        raise SpecError(path, "expected a positive number")
    return float(v)


def _need(obj, key, path):
    if key not in obj:
        raise SpecError(path, f"missing field '{key}'")
    return obj[key]


def from_spec(obj, path: str = "$") -> FuncExpr:
    """Build an expression tree from a parsed JSON object."""
    if not isinstance(obj, dict):
        raise SpecError(path, "expected an object with a 'kind' field")
    kind = _need(obj, "kind", path)
    try:
        if kind == "const":
            return Const(parse_complex(_need(obj, "c", path), f"{path}.c"))
        if kind == "z":
            return Poly((0, 1))
        if kind == "poly":
            return Poly(tuple(_clist(_need(obj, "coeffs", path), f"{path}.coeffs")))
        if kind == "rational":
            if "zeros" in obj or "poles" in obj:
                zs = [parse_complex(x, f"{path}.zeros[{i}]") for i, x in enumerate(obj.get("zeros", []))]
                ps = [parse_complex(x, f"{path}.poles[{i}]") for i, x in enumerate(obj.get("poles", []))]
                lead = parse_complex(obj.get("lead", 1), f"{path}.lead")
                return Rational.from_roots(zs, ps, lead)
            return Rational(tuple(_clist(_need(obj, "num", path), f"{path}.num")),
                            tuple(_clist(_need(obj, "den", path), f"{path}.den")))
        if kind == "exp":
            return ExpOf(from_spec(_need(obj, "inner", path), f"{path}.inner"))
        if kind == "gamma":
            return Gamma()
        if kind == "hypergamma":
            return HyperbolicGamma(_real(obj.get("a", 1.0), f"{path}.a", True),
                                   _real(obj.get("b", 1.0), f"{path}.b", True))
        if kind == "hayman":
            trunc = obj.get("truncation", 200)
            if isinstance(trunc, bool) or not isinstance(trunc, int) or trunc < 1:
                raise SpecError(f"{path}.truncation", "expected a positive integer")
            return HaymanThatcher(_real(obj.get("H", math.e), f"{path}.H"), trunc)
        if kind == "shift":
            return Shift(from_spec(_need(obj, "inner", path), f"{path}.inner"),
                         parse_complex(_need(obj, "eta", path), f"{path}.eta"))
        if kind == "product":
            fs = _need(obj, "factors", path)
            if not isinstance(fs, list) or not fs:
                raise SpecError(f"{path}.factors", "expected a non-empty list")
            return Product(tuple(from_spec(f, f"{path}.factors[{i}]") for i, f in enumerate(fs)))
        if kind == "quotient":
            return Quotient(from_spec(_need(obj, "num", path), f"{path}.num"),
                            from_spec(_need(obj, "den", path), f"{path}.den"))
        if kind == "power":
            k = _need(obj, "k", path)
            if isinstance(k, bool) or not isinstance(k, int) or k < 1:
                raise SpecError(f"{path}.k", "expected a positive integer")
            return Power(from_spec(_need(obj, "inner", path), f"{path}.inner"), k)
        if kind == "ratinf":
            a = _need(obj, "a", path)
            b = _need(obj, "b", path)
            for key, v in (("a", a), ("b", b)):
                if not isinstance(v, list) or not v:
                    raise SpecError(f"{path}.{key}", "expected a non-empty list of coefficients")
            ca = tuple(tuple(_clist(c if isinstance(c, list) and c and isinstance(c[0], list)
                                    else [c], f"{path}.a[{i}]")) for i, c in enumerate(a))
            cb = tuple(tuple(_clist(c if isinstance(c, list) and c and isinstance(c[0], list)
                                    else [c], f"{path}.b[{i}]")) for i, c in enumerate(b))
            return RationalInF(ca, cb, from_spec(_need(obj, "inner", path), f"{path}.inner"))
    except SpecError:
        raise
    except (ValueError, TypeError) as exc:
        raise SpecError(path, str(exc)) from exc
    raise SpecError(f"{path}.kind", f"unknown kind {kind!r}")


def _cjson(z: complex):
    return [float(z.real), float(z.imag)]


def to_spec(expr: FuncExpr) -> dict:
    """Inverse of from_spec (coefficients are always written as [re, im] pairs)."""
    if isinstance(expr, Const):
        return {"kind": "const", "c": _cjson(expr.c)}
    if isinstance(expr, Poly):
        return {"kind": "poly", "coeffs": [_cjson(c) for c in expr.coeffs]}
    if isinstance(expr, Rational):
        return {"kind": "rational", "num": [_cjson(c) for c in expr.num],
                "den": [_cjson(c) for c in expr.den]}
    if isinstance(expr, ExpOf):
        return {"kind": "exp", "inner": to_spec(expr.inner)}
    if isinstance(expr, Gamma):
        return {"kind": "gamma"}
    if isinstance(expr, HyperbolicGamma):
        return {"kind": "hypergamma", "a": expr.a, "b": expr.b}
    if isinstance(expr, HaymanThatcher):
        return {"kind": "hayman", "H": expr.H, "truncation": expr.truncation}
    if isinstance(expr, Shift):
        return {"kind": "shift", "eta": _cjson(expr.eta), "inner": to_spec(expr.inner)}
    if isinstance(expr, Product):
        return {"kind": "product", "factors": [to_spec(f) for f in expr.factors]}
    if isinstance(expr, Quotient):
        return {"kind": "quotient", "num": to_spec(expr.num), "den": to_spec(expr.den)}
    if isinstance(expr, Power):
        return {"kind": "power", "k": expr.k, "inner": to_spec(expr.inner)}
    if isinstance(expr, RationalInF):
        return {"kind": "ratinf",
                "a": [[_cjson(c) for c in poly] for poly in expr.a],
                "b": [[_cjson(c) for c in poly] for poly in expr.b],
                "inner": to_spec(expr.inner)}
    raise TypeError(f"cannot serialize {type(expr).__name__}")


def loads(text: str) -> FuncExpr:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    return from_spec(obj)


def load(source: str | Path) -> FuncExpr:
    """Parse an inline JSON string, or read it from a file path."""
    s = str(source).strip()
    if s.startswith("{"):
        return loads(s)
    p = Path(s)
    if not p.exists():
        raise SpecError("$", f"function spec file not found: {s}")
    return loads(p.read_text())
