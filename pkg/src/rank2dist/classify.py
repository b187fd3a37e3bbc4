"""Constant symplectic-curvature tuples: exceptional test, scaling, normal form."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .errors import ExceptionalTuple, InputError, IrrationalValue, TruncationExceeded
from .exactalg.scalars import exact_root, rat, sign, to_json
from .exactalg.jet import Jet
from .projcurve import WilczynskiSet, first_nonvanishing_even, ode_from_curvatures, wilczynski_forms

#: relative tolerance for the float backend
FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class RTuple:
    r: tuple

    def __post_init__(self):
        if not self.r:
            raise InputError("a curvature tuple needs m >= 1 entries")
        object.__setattr__(self, "r", tuple(x if isinstance(x, float) else rat(x) for x in self.r))

    @property
    def m(self) -> int:
        return len(self.r)

    def scaled(self, c_squared) -> "RTuple":
        return RTuple(tuple(x * c_squared ** (i + 1) for i, x in enumerate(self.r)))

    def to_json(self) -> list:
        return [to_json(x) for x in self.r]


def _as_tuple(t) -> RTuple:
    return t if isinstance(t, RTuple) else RTuple(tuple(t))


def char_poly(t) -> list:
    """Coefficients of lambda^{2m} + sum (-1)^i r_i lambda^{2(m-i)}, highest first."""
    t = _as_tuple(t)
    one = t.r[0] - t.r[0] + 1
    coeffs = [one]
    for i, ri in enumerate(t.r, start=1):
        coeffs += [one - one, ri * (-1) ** i]
    return coeffs


def alphas(m: int) -> List[int]:
    """alpha_{m,i} from prod_{i=1}^m (x^2 - (2i-1)^2) = x^{2m} + sum (-1)^i alpha_{m,i} x^{2(m-i)}."""
    if m < 1:
        raise InputError("m must be >= 1")
    poly = [1]  # coefficients in x^2, highest first
    for i in range(1, m + 1):
        root = (2 * i - 1) ** 2
        nxt = poly + [0]
        for k, a in enumerate(poly):
            nxt[k + 1] -= root * a
        poly = nxt
    return [(-1) ** i * poly[i] for i in range(1, m + 1)]


@dataclass(frozen=True)
class ExceptionalResult:
    flag: bool
    step_squared: object = None

    def __bool__(self):
        return self.flag


def is_exceptional(t) -> ExceptionalResult:
    """r_i = alpha_{m,i} (r_1/alpha_{m,1})^i for all i.

    When true, the roots of the characteristic polynomial are
    +-(2j-1) s with s^2 = step_squared.
    """
    t = _as_tuple(t)
    al = alphas(t.m)
    s2 = t.r[0] / al[0]
    for i, (ri, a) in enumerate(zip(t.r, al), start=1):
        if not _close(ri, a * s2 ** i):
            return ExceptionalResult(False, None)
    return ExceptionalResult(True, s2)


def _close(x, y) -> bool:
    if isinstance(x, float) or isinstance(y, float):
        return abs(x - y) <= FLOAT_TOL * max(1.0, abs(x), abs(y))
    return x == y


@dataclass(frozen=True)
class Equivalence:
    """b_i = c^{2i} a_i; ``c_pow`` = c^{2g} is exact, ``c`` exact when rational."""

    c: object
    c_pow: object
    g: int


def equivalent_tuples(a, b) -> Optional[Equivalence]:
    a, b = _as_tuple(a), _as_tuple(b)
    if a.m != b.m:
        raise InputError("tuples of different length")
    idx = []
    for i, (x, y) in enumerate(zip(a.r, b.r), start=1):
        if (x == 0) != (y == 0):
            return None
        if x != 0:
            idx.append(i)
    if not idx:
        one = rat(1)
        return Equivalence(one, one, 1)
    q = {i: b.r[i - 1] / a.r[i - 1] for i in idx}
    # s = c^2 must satisfy s^i = q_i; s^g is rational for g = gcd of the indices
    g = 0
    for i in idx:
        g = math.gcd(g, i)
    coeffs = _bezout(idx)
    sg = rat(1) if not isinstance(q[idx[0]], float) else 1.0
    for i, x in zip(idx, coeffs):
        sg = sg * q[i] ** x if x >= 0 else sg / q[i] ** (-x)
    if sg <= 0:
        return None
    for i in idx:
        if not _close(q[i], sg ** (i // g)):
            return None
    try:
        c = exact_root(sg, 2 * g)
    except IrrationalValue:
        c = float(sg) ** (1.0 / (2 * g))
    return Equivalence(c, sg, g)


def _bezout(nums: Sequence[int]) -> List[int]:
    """Integers x with sum x_k nums_k = gcd(nums)."""
    g, coeffs = nums[0], [1]
    for n in nums[1:]:
        d, x, y = _ext_gcd(g, n)
        coeffs = [c * x for c in coeffs] + [y]
        g = d
    return coeffs


def _ext_gcd(a: int, b: int):
    if b == 0:
        return a, 1, 0
    d, x, y = _ext_gcd(b, a % b)
    return d, y, x - (a // b) * y


@dataclass(frozen=True)
class Normalization:
    c: object
    c_squared: object
    normalized: RTuple
    i0: int
    epsilon: int
    invariants: tuple = field(default=())


def wilczynski_values(t, order: Optional[int] = None) -> list:
    """Constant values A_i of the Wilczynski forms of the constant-curvature ODE."""
    t = _as_tuple(t)
    m = t.m
    # 3m - 2 is the least order surviving the gauge and parameter changes
    order = order if order is not None else 3 * m - 2
    try:
        forms = wilczynski_forms(ode_from_curvatures(list(t.r), order=order))
    except TruncationExceeded:
        forms = wilczynski_forms(ode_from_curvatures(list(t.r), order=2 * order + 4))
    return [forms[i][0] for i in forms.indices()]


def compatible_normalization(t, backend: str = "exact") -> Normalization:
    """The unique c > 0 such that the rescaled tuple has |A_{i0}| = 1."""
    t = _as_tuple(t)
    if backend == "float":
        t = RTuple(tuple(float(x) for x in t.r))
    if is_exceptional(t):
        raise ExceptionalTuple("exceptional tuple: all Wilczynski invariants vanish")
    values = wilczynski_values(t)
    forms = WilczynskiSet(t.m, tuple(Jet.const(v, 0) for v in values))
    i0, A = first_nonvanishing_even(forms)
    if i0 is None:
        raise ExceptionalTuple("all even Wilczynski invariants vanish")
    a0 = A[0]
    # c^(2 i0 + 2) |A| = 1, and only c^2 enters the tuple
    c2 = exact_root(1 / abs(a0), i0 + 1)
    try:
        c = exact_root(c2, 2)
    except IrrationalValue:
        c = math.sqrt(float(c2))
    return Normalization(c, c2, t.scaled(c2), i0, sign(a0), tuple(values))


@dataclass(frozen=True)
class ClassReport:
    m: int
    char_poly: list
    is_exceptional: bool
    progression_step_squared: object
    equivalence_normal_form: Optional[RTuple]
    compatible_scale: object
    i0: Optional[int]
    epsilon: Optional[int]
    on_exceptional_leaf: bool
    backend: str = "exact"

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "char_poly": [to_json(x) for x in self.char_poly],
            "is_exceptional": self.is_exceptional,
            "progression_step_squared": None if self.progression_step_squared is None else to_json(self.progression_step_squared),
            "equivalence_normal_form": None if self.equivalence_normal_form is None else self.equivalence_normal_form.to_json(),
            "compatible_scale": None if self.compatible_scale is None else to_json(self.compatible_scale),
            "i0": self.i0,
            "epsilon": self.epsilon,
            "on_exceptional_leaf": self.on_exceptional_leaf,
            "backend": self.backend,
        }


def moduli_report(t, backend: str = "exact") -> ClassReport:
    """Bundle the classification of one tuple.

    Exceptional tuples lie on the leaf of the flat model and get no normal
    form.  When the compatible scale is irrational the normal form is
    computed in floating point and ``backend`` records this.
    """
    t = _as_tuple(t)
    exc = is_exceptional(t)
    normal = scale = i0 = eps = None
    used = backend
    if not exc:
        try:
            nz = compatible_normalization(t, backend)
        except IrrationalValue:
            used = "float"
            nz = compatible_normalization(t, "float")
        normal, scale, i0, eps = nz.normalized, nz.c, nz.i0, nz.epsilon
    return ClassReport(
        m=t.m,
        char_poly=char_poly(t),
        is_exceptional=exc.flag,
        progression_step_squared=exc.step_squared,
        equivalence_normal_form=normal,
        compatible_scale=scale,
        i0=i0,
        epsilon=eps,
        on_exceptional_leaf=exc.flag,
        backend=used,
    )
