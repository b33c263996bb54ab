"""Meromorphic expression trees with log-magnitude evaluation and exact divisors."""

from .divisor import Divisor
from .errors import (ContinuationError, DivisorHitError, FuncAlgError, PoleError,
                     RootIsolationError, SpecError)
from .expr import (Const, ExpOf, FuncExpr, Gamma, HaymanThatcher, HyperbolicGamma, Poly,
                   Power, Product, Quotient, Rational, RationalInF, Shift, divisor_in_disk,
                   eval_log_abs, hyperbolic_gamma_log_abs, preimages)
from .lgamma import lgamma_complex, log_abs_gamma, loggamma
from .specjson import from_spec, load, loads, to_spec

Z = Poly((0, 1))

__all__ = [
    "Const", "ContinuationError", "Divisor", "DivisorHitError", "ExpOf", "FuncAlgError",
    "FuncExpr", "Gamma", "HaymanThatcher", "HyperbolicGamma", "PoleError", "Poly", "Power",
    "Product", "Quotient", "Rational", "RationalInF", "RootIsolationError", "Shift",
    "SpecError", "Z", "divisor_in_disk", "eval_log_abs", "from_spec", "hyperbolic_gamma_log_abs",
    "lgamma_complex", "load", "loads", "log_abs_gamma", "loggamma", "preimages", "to_spec",
]
