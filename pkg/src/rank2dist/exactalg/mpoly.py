"""Sparse multivariate polynomials and polynomial vector fields.

Terms are stored as ``{exponent tuple: coefficient}`` with zero coefficients
dropped.  Printing and iteration use graded-lexicographic order so output
is deterministic.
"""
from __future__ import annotations

import ast
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple

from ..errors import DimensionMismatch, InputError
from .scalars import is_zero, rat

Exponent = Tuple[int, ...]


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


class MPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: Dict[Exponent, object] = {}
        for exp, c in (terms or {}).items():
            if len(exp) != nvars:
                raise DimensionMismatch(f"exponent {exp} has wrong length for {nvars} variables")
            if not is_zero(c, 0.0):
                clean[tuple(exp)] = c
        self.terms = clean

    @classmethod
    def const(cls, c, nvars: int) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int, coeff=None) -> "MPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): rat(1) if coeff is None else coeff})

    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls(nvars)

    # -- protocol --------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if not self.terms:
            return other == 0
        return self.degree() == 0 and self.terms.get((0,) * self.nvars) == other

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __repr__(self):
        return f"MPoly({self.to_string()})"

    def to_string(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                (n if e == 1 else f"{n}^{e}") for n, e in zip(names, exp) if e
            )
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise DimensionMismatch("polynomials live in different numbers of variables")
            return other
        return MPoly.const(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, 0) + c
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return MPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        out: Dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, MPoly):
            if c.degree() != 0:
                raise InputError("polynomial division is only by constants")
            c = c.terms[(0,) * self.nvars]
        return MPoly(self.nvars, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise InputError("polynomial powers must be non-negative integers")
        out = MPoly.const(rat(1), self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff(self, i: int) -> "MPoly":
        out = {}
        for exp, c in self.terms.items():
            if exp[i]:
                e = list(exp)
                e[i] -= 1
                out[tuple(e)] = c * exp[i]
        return MPoly(self.nvars, out)

    def map_coeffs(self, f: Callable) -> "MPoly":
        return MPoly(self.nvars, {e: f(c) for e, c in self.terms.items()})

    def variables(self) -> set:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    # -- evaluation ------------------------------------------------------
    def __call__(self, point: Sequence):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Evaluate at scalars, jets, or any ring elements supporting + and *."""
        if len(point) != self.nvars:
            raise DimensionMismatch("point has wrong dimension")
        powers: Dict[Tuple[int, int], object] = {}

        def pw(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = point[i] if k == 1 else pw(i, k - 1) * point[i]
            return powers[key]

        total = None
        for exp, c in self.terms.items():
            term = None
            for i, k in enumerate(exp):
                if k:
                    f = pw(i, k)
                    term = f if term is None else term * f
            term = c if term is None else term * c
            total = term if total is None else total + term
        if total is None:
            return 0 * point[0] if point else rat(0)
        return total

    def substitute(self, images: Sequence["MPoly"]) -> "MPoly":
        """Compose with a polynomial map ``x_i -> images[i]``."""
        if len(images) != self.nvars:
            raise DimensionMismatch("need one image per variable")
        nv = images[0].nvars
        if not self.terms:
            return MPoly.zero(nv)
        return self.evaluate(list(images)) + MPoly.zero(nv)


class PolyVF:
    """Vector field ``sum_i comps[i] * d/dx_i`` with polynomial components."""

    __slots__ = ("nvars", "comps")

    def __init__(self, comps: Sequence[MPoly]):
        comps = tuple(comps)
        if not comps:
            raise DimensionMismatch("empty vector field")
        n = comps[0].nvars
        if len(comps) != n or any(c.nvars != n for c in comps):
            raise DimensionMismatch("vector field needs nvars components in nvars variables")
        self.nvars = n
        self.comps = comps

    @classmethod
    def coordinate(cls, i: int, nvars: int) -> "PolyVF":
        return cls([MPoly.const(rat(1), nvars) if k == i else MPoly.zero(nvars) for k in range(nvars)])

    @classmethod
    def zero(cls, nvars: int) -> "PolyVF":
        return cls([MPoly.zero(nvars)] * nvars)

    def __eq__(self, other):
        return isinstance(other, PolyVF) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __repr__(self):
        return f"PolyVF({self.to_string()})"

    def to_string(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i}" for i in range(self.nvars)]
        parts = [
            f"({c.to_string(names)})*d/d{n}" for c, n in zip(self.comps, names) if c
        ]
        return " + ".join(parts) if parts else "0"

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __add__(self, other: "PolyVF") -> "PolyVF":
        self._check(other)
        return PolyVF([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "PolyVF") -> "PolyVF":
        self._check(other)
        return PolyVF([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return PolyVF([-a for a in self.comps])

    def scale(self, f) -> "PolyVF":
        """Multiply by a scalar or a polynomial function."""
        return PolyVF([f * a if isinstance(f, MPoly) else a * f for a in self.comps])

    def _check(self, other):
        if not isinstance(other, PolyVF) or other.nvars != self.nvars:
            raise DimensionMismatch("vector fields on different spaces")

    def apply(self, f: MPoly) -> MPoly:
        """Directional derivative ``V(f)``."""
        if f.nvars != self.nvars:
            raise DimensionMismatch("function and field on different spaces")
        out = MPoly.zero(self.nvars)
        for i in f.variables():
            if self.comps[i]:
                out = out + self.comps[i] * f.diff(i)
        return out

    def evaluate(self, point: Sequence) -> list:
        return [c.evaluate(point) for c in self.comps]


def lie_bracket(v: PolyVF, w: PolyVF) -> PolyVF:
    """``[V, W]`` with components ``V(W^k) - W(V^k)``."""
    if v.nvars != w.nvars:
        raise DimensionMismatch("vector fields on different spaces")
    return PolyVF([v.apply(b) - w.apply(a) for a, b in zip(v.comps, w.comps)])


# -- literal parsing --------------------------------------------------------

def parse_poly(text: str, names: Sequence[str]) -> MPoly:
    """Parse ``"3/2*y1^2*y2 - x"`` over the given variable names."""
    index = {n: i for i, n in enumerate(names)}
    nv = len(names)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"malformed polynomial {text!r}") from exc

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return MPoly.const(rat(str(node.value)), nv)
        if isinstance(node, ast.Name):
            if node.id not in index:
                raise InputError(f"unknown variable {node.id!r} in {text!r}")
            return MPoly.var(index[node.id], nv)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right.degree() > 0 or right.is_zero():
                    raise InputError(f"division by a non-constant or zero in {text!r}")
                return left / right
            if isinstance(node.op, ast.Pow):
                if right.degree() > 0:
                    raise InputError(f"non-constant exponent in {text!r}")
                k = right.terms.get((0,) * nv, 0)
                if k != int(k) or k < 0:
                    raise InputError(f"exponent must be a non-negative integer in {text!r}")
                return left ** int(k)
        raise InputError(f"unsupported syntax in polynomial {text!r}")

    return walk(tree)


def parse_field(texts: Iterable[str], names: Sequence[str]) -> PolyVF:
    return PolyVF([parse_poly(t, names) for t in texts])
