"""Truncated multivariate power series at the origin.

An ``MSeries`` of precision N stores every term of total degree <= N and
nothing above; like ``Jet`` the precision is the degree to which the series
is known exactly.  Differentiation lowers it by one.  Exact polynomials
enter with the precision chosen by the caller.
"""
from __future__ import annotations

from typing import Dict, Tuple

from ..errors import DimensionMismatch, NonInvertibleSeries, TruncationExceeded
from .mpoly import MPoly
from .scalars import rat

Exponent = Tuple[int, ...]


def _gen_binomial(q, k: int):
    out = rat(1)
    for j in range(k):
        out = out * (q - j) / (j + 1)
    return out


class MSeries:
    __slots__ = ("nvars", "prec", "terms")

    def __init__(self, nvars: int, terms: Dict[Exponent, object], prec: int):
        if prec < 0:
            raise TruncationExceeded("multivariate series known to no order")
        self.nvars = nvars
        self.prec = prec
        self.terms = {e: c for e, c in terms.items() if c != 0 and sum(e) <= prec}

    @classmethod
    def const(cls, c, nvars: int, prec: int) -> "MSeries":
        return cls(nvars, {(0,) * nvars: c}, prec)

    @classmethod
    def from_mpoly(cls, p: MPoly, prec: int) -> "MSeries":
        return cls(p.nvars, dict(p.terms), prec)

    # -- protocol --------------------------------------------------------
    def __repr__(self):
        return f"MSeries({len(self.terms)} terms, prec={self.prec})"

    def lead(self):
        """Value at the origin."""
        return self.terms.get((0,) * self.nvars, rat(0))

    def is_zero(self) -> bool:
        return not self.terms

    def is_negligible(self, *refs) -> bool:
        return self.is_zero()

    def truncate(self, prec: int) -> "MSeries":
        return MSeries(self.nvars, self.terms, min(prec, self.prec))

    def _other(self, other) -> "MSeries":
        if isinstance(other, MSeries):
            if other.nvars != self.nvars:
                raise DimensionMismatch("series in different numbers of variables")
            return other
        return MSeries.const(other, self.nvars, self.prec)

    def __add__(self, other):
        other = self._other(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MSeries(self.nvars, out, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return MSeries(self.nvars, {e: -c for e, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MSeries):
            return MSeries(self.nvars, {e: c * other for e, c in self.terms.items()}, self.prec)
        other = self._other(other)
        prec = min(self.prec, other.prec)
        by_deg: Dict[int, list] = {}
        for e, c in other.terms.items():
            by_deg.setdefault(sum(e), []).append((e, c))
        out: Dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            room = prec - sum(e1)
            for d in range(room + 1):
                for e2, c2 in by_deg.get(d, ()):
                    e = tuple(a + b for a, b in zip(e1, e2))
                    out[e] = out.get(e, 0) + c1 * c2
        return MSeries(self.nvars, out, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MSeries):
            return self * other.reciprocal()
        return MSeries(self.nvars, {e: c / other for e, c in self.terms.items()}, self.prec)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "MSeries":
        a0 = self.lead()
        if a0 == 0:
            raise NonInvertibleSeries("series is not a unit at the origin")
        return self._unit_power(-1)

    def power(self, q) -> "MSeries":
        """(1 + d)^q for a series with constant term 1."""
        if self.lead() != 1:
            raise NonInvertibleSeries("fractional powers need constant term 1")
        return self._unit_power(q)

    def _unit_power(self, q) -> "MSeries":
        a0 = self.lead()
        d = self / a0 - 1
        out = MSeries.const(rat(1), self.nvars, self.prec)
        term = out
        for k in range(1, self.prec + 1):
            term = term * d
            out = out + term * _gen_binomial(q, k)
        if q == -1:
            return out / a0
        return out

    def diff(self, i: int) -> "MSeries":
        if self.prec == 0:
            raise TruncationExceeded("differentiating a series known only to degree 0")
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return MSeries(self.nvars, out, self.prec - 1)
