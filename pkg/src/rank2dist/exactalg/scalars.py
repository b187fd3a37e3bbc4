"""Scalar helpers shared by the exact (``mpq``) and float backends."""
from __future__ import annotations

import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpq

from ..errors import InputError, IrrationalValue

Rat = mpq

#: pivot tolerance of the float backend for rank decisions
FLOAT_PIVOT_TOL = 1e-10

#: tolerance of float-backend consistency checks on jets, relative to the
#: size of the data being compared.  Rounding error in the k-th Taylor
#: coefficient grows roughly geometrically with k (every stage differentiates
#: or solves Wronskian systems), so coefficient k is allowed
#: FLOAT_CHECK_TOL * FLOAT_CHECK_GROWTH**k.
FLOAT_CHECK_TOL = 1e-7
FLOAT_CHECK_GROWTH = 2.5

BACKENDS = ("exact", "float")


def rat(x) -> mpq:
    """Coerce ints, ``"p/q"`` strings, decimals, Fractions and mpq to ``mpq``."""
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            f = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {x!r}") from exc
        return mpq(f.numerator, f.denominator)
    if isinstance(x, float):
        f = Fraction(x)
        return mpq(f.numerator, f.denominator)
    raise InputError(f"not a rational: {x!r}")


def convert(x, backend: str):
    if backend == "exact":
        return rat(x)
    if backend == "float":
        return float(rat(x)) if isinstance(x, str) else float(x)
    raise InputError(f"unknown backend {backend!r}")


def is_exact(x) -> bool:
    return not isinstance(x, float)


def is_zero(x, tol: float = FLOAT_PIVOT_TOL) -> bool:
    if isinstance(x, float):
        return abs(x) <= tol
    return x == 0


def sign(x) -> int:
    return (x > 0) - (x < 0)


def exact_root(x, k: int):
    """Real ``k``-th root of ``x``; exact for ``mpq`` input or ``IrrationalValue``."""
    if k < 1:
        raise ValueError("root index must be positive")
    if isinstance(x, float):
        if x < 0 and k % 2 == 0:
            raise ValueError("even root of a negative number")
        return math.copysign(abs(x) ** (1.0 / k), x)
    x = rat(x)
    if x < 0:
        if k % 2 == 0:
            raise ValueError("even root of a negative number")
        return -exact_root(-x, k)
    num, ok_n = gmpy2.iroot(x.numerator, k)
    den, ok_d = gmpy2.iroot(x.denominator, k)
    if not (ok_n and ok_d):
        raise IrrationalValue(f"{x} has no rational {k}-th root")
    return mpq(int(num), int(den))


def rational_power(x, p):
    """``x**p`` for a rational exponent ``p``; exact when the root is rational."""
    p = Fraction(p)
    r = exact_root(x, p.denominator)
    if isinstance(r, float):
        return r ** p.numerator
    return r ** p.numerator if p.numerator >= 0 else 1 / r ** (-p.numerator)


def to_json(x) -> str | float:
    """Rationals travel as ``"p/q"`` strings, floats as JSON numbers."""
    if isinstance(x, float):
        return x
    return str(rat(x))


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)
