"""Truncated power series ("jets") at the base point 0 of a local parameter.

A ``Jet`` of order K stores the Taylor coefficients c_0..c_K.  Arithmetic
between jets of different orders truncates to the smaller order, so the
stored order is always the order to which the result is known exactly.
Operations that would leave nothing known raise ``TruncationExceeded``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import (
    DivisionByZeroSeries,
    NonCompositionalArgument,
    NonInvertibleSeries,
    SingularReparametrization,
    TruncationExceeded,
)
from .scalars import FLOAT_CHECK_GROWTH, FLOAT_CHECK_TOL, convert, is_zero, rat, rational_power


class Jet:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise TruncationExceeded("a jet needs at least one coefficient")
        self.coeffs = coeffs

    # -- construction ----------------------------------------------------
    @classmethod
    def const(cls, c, order: int) -> "Jet":
        zero = c - c
        return cls((c,) + (zero,) * order)

    @classmethod
    def variable(cls, order: int, one=None) -> "Jet":
        """The identity jet ``t``."""
        one = rat(1) if one is None else one
        zero = one - one
        if order < 1:
            return cls((zero,))
        return cls((zero, one) + (zero,) * (order - 1))

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "Jet":
        return cls(rat(s) for s in items)

    @classmethod
    def exp_series(cls, order: int) -> "Jet":
        return cls(rat(1) / math.factorial(k) for k in range(order + 1))

    @classmethod
    def log1p_series(cls, order: int) -> "Jet":
        return cls([rat(0)] + [rat((-1) ** (k + 1)) / k for k in range(1, order + 1)])

    @classmethod
    def tan_series(cls, order: int) -> "Jet":
        t = cls.variable(order)
        return t.sin() / t.cos()

    @classmethod
    def tanh_series(cls, order: int) -> "Jet":
        t = cls.variable(order)
        e = (2 * t).exp()
        return (e - 1) / (e + 1)

    # -- basic protocol --------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"Jet({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    @property
    def zero(self):
        c = self.coeffs[0]
        return c - c

    def lead(self):
        return self.coeffs[0]

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise TruncationExceeded(f"jet of order {self.order} cannot be read to order {order}")
        if order < 0:
            raise TruncationExceeded("negative jet order")
        return Jet(self.coeffs[: order + 1])

    def is_zero(self, tol=None) -> bool:
        if tol is None:
            return all(is_zero(c) for c in self.coeffs)
        return all(is_zero(c, tol) for c in self.coeffs)

    def magnitude(self) -> float:
        return max(abs(float(c)) for c in self.coeffs)

    def is_negligible(self, *refs: "Jet", derivs: int = 0) -> bool:
        """Exact zero test, or for floats smallness relative to ``refs``.

        ``derivs`` is the number of differentiations the compared quantity
        went through; each one multiplies the k-th coefficient (and its
        rounding error) by k + 1.
        """
        if not isinstance(self.coeffs[0], float):
            return self.is_zero()
        scale = max([1.0] + [r.magnitude() for r in refs])
        return all(
            abs(c) <= FLOAT_CHECK_TOL * scale * FLOAT_CHECK_GROWTH ** (k + derivs) * math.perm(k + derivs, derivs)
            for k, c in enumerate(self.coeffs)
        )

    def is_constant(self) -> bool:
        return all(is_zero(c) for c in self.coeffs[1:])

    def to_float(self) -> "Jet":
        return Jet(float(c) for c in self.coeffs)

    def convert(self, backend: str) -> "Jet":
        return Jet(convert(c, backend) for c in self.coeffs)

    # -- ring operations -------------------------------------------------
    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.const(other + self.zero, self.order)

    def __add__(self, other):
        other = self._lift(other)
        n = min(len(self), len(other))
        return Jet(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(a * other for a in self.coeffs)
        a, b = self.coeffs, other.coeffs
        n = min(len(a), len(b))
        out = []
        for k in range(n):
            s = a[0] * b[k]
            for i in range(1, k + 1):
                s += a[i] * b[k - i]
            out.append(s)
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            if is_zero(other):
                raise DivisionByZeroSeries("division by zero scalar")
            return Jet(a / other for a in self.coeffs)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet":
        b = self.coeffs
        if is_zero(b[0]):
            raise DivisionByZeroSeries("series with zero constant term is not a unit")
        inv0 = 1 / b[0]
        q = [inv0]
        for k in range(1, len(b)):
            s = b[1] * q[k - 1]
            for i in range(2, k + 1):
                s += b[i] * q[k - i]
            q.append(-s * inv0)
        return Jet(q)

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = Jet.const(self.zero + 1, self.order)
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base
                p >>= 1
            return out
        if isinstance(p, int):
            return (self ** (-p)).reciprocal()
        return self.power(p)

    def power(self, p) -> "Jet":
        """``self**p`` for a rational exponent; needs a nonzero constant term.

        Uses the recurrence from ``a f' = p a' f``.
        """
        a = self.coeffs
        if is_zero(a[0]):
            raise DivisionByZeroSeries("fractional power of a non-unit series")
        pf = Fraction(int(p.numerator), int(p.denominator)) if hasattr(p, "numerator") else Fraction(p)
        if isinstance(a[0], float):
            p = float(pf)
            f0 = a[0] ** p
        else:
            p = rat(pf)
            f0 = rational_power(a[0], pf)
        f = [f0]
        inv = 1 / a[0]
        for k in range(1, len(a)):
            s = self.zero
            for j in range(1, k + 1):
                s += (p * j - (k - j)) * a[j] * f[k - j]
            f.append(s * inv / k)
        return Jet(f)

    # -- calculus --------------------------------------------------------
    def derivative(self, times: int = 1) -> "Jet":
        out = self
        for _ in range(times):
            if out.order < 1:
                raise TruncationExceeded("cannot differentiate a jet of order 0")
            out = Jet(k * c for k, c in enumerate(out.coeffs) if k > 0)
        return out

    def integrate(self, c0=None) -> "Jet":
        c0 = self.zero if c0 is None else c0
        return Jet([c0] + [c / (k + 1) for k, c in enumerate(self.coeffs)])

    def compose(self, inner: "Jet") -> "Jet":
        """``self(inner(t))``; ``inner`` must vanish at 0."""
        if not is_zero(inner.coeffs[0]):
            raise NonCompositionalArgument("inner series must have zero constant term")
        n = min(self.order, inner.order)
        b = Jet((self.zero,) + inner.coeffs[1 : n + 1])
        a = self.coeffs
        out = Jet.const(a[n], n)
        for k in range(n - 1, -1, -1):
            out = out * b + a[k]
        return out

    def revert(self) -> "Jet":
        """Compositional inverse: ``self.compose(self.revert()) == t``."""
        b = self.coeffs
        if self.order < 1:
            raise TruncationExceeded("reversion needs order >= 1")
        if not is_zero(b[0]):
            raise NonInvertibleSeries("series must vanish at 0")
        if is_zero(b[1]):
            raise NonInvertibleSeries("series must have nonzero linear term")
        n = self.order
        t = Jet.variable(n, one=b[1] / b[1])
        c = t / b[1]
        # each sweep fixes one more coefficient
        for _ in range(n):
            c = c - (self.compose(c) - t) / b[1]
        return c

    def exp(self) -> "Jet":
        a = self.coeffs
        if isinstance(a[0], float):
            f0 = math.exp(a[0])
        elif a[0] == 0:
            f0 = a[0] + 1
        else:
            raise NonCompositionalArgument("exact exp needs zero constant term")
        f = [f0]
        for k in range(1, len(a)):
            s = self.zero
            for j in range(1, k + 1):
                s += j * a[j] * f[k - j]
            f.append(s / k)
        return Jet(f)

    def log(self) -> "Jet":
        a0 = self.coeffs[0]
        if isinstance(a0, float):
            c0 = math.log(a0)
        elif a0 == 1:
            c0 = self.zero
        else:
            raise NonCompositionalArgument("exact log needs constant term 1")
        if self.order == 0:
            return Jet((c0,))
        return (self.derivative() / self.truncate(self.order - 1)).integrate(c0)

    def sin(self) -> "Jet":
        s, _ = self._sincos()
        return s

    def cos(self) -> "Jet":
        _, c = self._sincos()
        return c

    def _sincos(self):
        a = self.coeffs
        if not isinstance(a[0], float) and a[0] != 0:
            raise NonCompositionalArgument("exact sin/cos needs zero constant term")
        s0 = math.sin(a[0]) if isinstance(a[0], float) else self.zero
        c0 = math.cos(a[0]) if isinstance(a[0], float) else self.zero + 1
        s, c = [s0], [c0]
        for k in range(1, len(a)):
            ss, cc = self.zero, self.zero
            for j in range(1, k + 1):
                ss += j * a[j] * c[k - j]
                cc -= j * a[j] * s[k - j]
            s.append(ss / k)
            c.append(cc / k)
        return Jet(s), Jet(c)


def schwarzian(v: Jet) -> Jet:
    """Half the classical Schwarzian: ``w' - w**2`` with ``w = v''/(2 v')``."""
    if v.order < 3:
        raise TruncationExceeded("the Schwarzian needs a jet of order >= 3")
    d1 = v.derivative()
    if is_zero(d1[0]):
        raise SingularReparametrization("v'(0) = 0")
    d2 = d1.derivative()
    w = d2 / (2 * d1)
    return w.derivative() - (w * w).truncate(w.order - 1)


_JET_OPS = ("add", "sub", "mul", "div", "compose", "invert_series", "differentiate", "integrate")


def jet_arith(a: Jet, b: Jet | None, op: str) -> Jet:
    """Dispatch one of the elementary jet operations by name."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "compose":
        return a.compose(b)
    if op == "invert_series":
        return (b if b is not None else a).revert()
    if op == "differentiate":
        return a.derivative()
    if op == "integrate":
        return a.integrate()
    raise ValueError(f"unknown jet operation {op!r}; expected one of {_JET_OPS}")


def common_order(jets: Sequence[Jet]) -> int:
    return min(j.order for j in jets)
