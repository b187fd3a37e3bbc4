"""Curves in projective space given by their fundamental linear ODE.

A curve in P^{2m-1} is stored as the monic ODE

    E^{(2m)} = sum_{i<2m} B_i(t) E^{(i)}

satisfied by a section E of its tautological line bundle, with jet-valued
coefficients.  Everything here is a pure transformation of such ODEs:
changing the section (gauge), changing the parameter, reading off the
Wilczynski invariants and the symplectic curvatures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    AllInvariantsVanish,
    DegenerateForm,
    DegenerateOsculation,
    InputError,
    NotSelfDual,
    TruncationExceeded,
    WrongGauge,
)
from .exactalg import linalg
from .exactalg.jet import Jet, common_order
from .exactalg.scalars import binomial, exact_root, is_zero, rat, sign, to_json

PARAM_TAGS = ("arbitrary", "semi_canonical", "projective", "canonical")


@dataclass(frozen=True)
class CurveODE:
    m: int
    B: Tuple[Jet, ...]
    param_tag: str = "arbitrary"

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(self.B))
        if self.m < 1:
            raise InputError("m must be >= 1")
        if len(self.B) != 2 * self.m:
            raise InputError(f"expected {2 * self.m} coefficients B_0..B_(2m-1), got {len(self.B)}")
        if self.param_tag not in PARAM_TAGS:
            raise InputError(f"unknown param_tag {self.param_tag!r}")
        if self.param_tag != "arbitrary" and not self.B[-1].is_zero():
            raise WrongGauge(f"{self.param_tag} ODE must have B_(2m-1) = 0")
        if self.param_tag == "projective" and not self.B[-2].is_zero():
            raise WrongGauge("projective ODE must have B_(2m-2) = 0")

    @property
    def order(self) -> int:
        return common_order(self.B)

    def with_tag(self, tag: str) -> "CurveODE":
        return CurveODE(self.m, self.B, tag)

    def truncate(self, order: int) -> "CurveODE":
        return CurveODE(self.m, [b.truncate(order) for b in self.B], self.param_tag)

    def to_float(self) -> "CurveODE":
        return CurveODE(self.m, [b.to_float() for b in self.B], self.param_tag)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "B": [[to_json(c) for c in b] for b in self.B],
            "param_tag": self.param_tag,
        }

    @classmethod
    def from_json(cls, data: dict, backend: str = "exact") -> "CurveODE":
        try:
            m = int(data["m"])
            B = [Jet.from_strings([str(x) for x in b]) for b in data["B"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed CurveODE: {exc}") from exc
        if backend == "float":
            B = [b.to_float() for b in B]
        return cls(m, B, data.get("param_tag", "arbitrary"))

    @classmethod
    def constant(cls, m: int, values: Sequence, order: int, tag: str = "arbitrary") -> "CurveODE":
        return cls(m, [Jet.const(rat(v) if not isinstance(v, float) else v, order) for v in values], tag)


@dataclass(frozen=True)
class WilczynskiSet:
    """W_i for i = 1..2m-2 as jets; W_i is a differential of degree i+2."""

    m: int
    W: Tuple[Jet, ...]

    def __getitem__(self, i: int) -> Jet:
        if not 1 <= i <= len(self.W):
            raise IndexError(i)
        return self.W[i - 1]

    def weight(self, i: int) -> int:
        return i + 2

    def indices(self):
        return range(1, len(self.W) + 1)

    def odd(self) -> Dict[int, Jet]:
        return {i: self[i] for i in self.indices() if i % 2}

    def even(self) -> Dict[int, Jet]:
        return {i: self[i] for i in self.indices() if i % 2 == 0}

    def all_zero(self) -> bool:
        return all(w.is_zero() for w in self.W)


@dataclass(frozen=True)
class SympForm:
    """Constant form on the solution space, in the basis E^{(i)}(0)."""

    matrix: Tuple[Tuple, ...]

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __call__(self, i: int, j: int):
        return self.matrix[i][j]

    def scaled(self, s) -> "SympForm":
        return SympForm(tuple(tuple(x * s for x in row) for row in self.matrix))


@dataclass(frozen=True)
class CurvatureTuple:
    m: int
    rho: Tuple[Jet, ...]
    epsilon: Optional[int] = None
    i0: Optional[int] = None

    def constants(self) -> list:
        return [r[0] for r in self.rho]

    def is_constant(self) -> bool:
        return all(r.is_constant() for r in self.rho)


@dataclass(frozen=True)
class StrongScale:
    """Result of normalizing a section so that |sigma(E^(m), E^(m-1))| = 1."""

    ode: CurveODE
    scale: object
    scale_squared: object
    form: SympForm
    orientation: int


# -- vector curves and their fundamental ODE ---------------------------------

def fundamental_solutions(c: CurveODE) -> List[Jet]:
    """Solutions E_j with E_j^{(i)}(0) = delta_ij, i, j < 2m, as jets.

    The vector of these solutions is the curve itself (``Y^{(i)}(0) = e_i``);
    its order is the ODE order plus 2m.
    """
    n = 2 * c.m
    K = c.order
    B = [b.coeffs for b in c.B]
    zero = c.B[0].zero
    one = zero + 1
    sols = []
    for j in range(n):
        y = [zero] * n
        y[j] = one / math.factorial(j)
        for k in range(K + 1):
            # coefficient of t^k in sum_i B_i y^{(i)}
            s = zero
            for i in range(n):
                bi = B[i]
                for a in range(k + 1):
                    idx = k - a + i
                    if idx < len(y) and not is_zero(bi[a], 0.0):
                        s += bi[a] * y[idx] * (math.factorial(idx) // math.factorial(k - a))
            y.append(s * math.factorial(k) / math.factorial(k + n))
        sols.append(Jet(y))
    return sols


def curve_ode(Y: Sequence[Jet], m: int, tag: str = "arbitrary") -> CurveODE:
    """The monic order-2m ODE annihilating every component of the curve Y."""
    n = 2 * m
    if len(Y) != n:
        raise InputError("curve must have 2m components")
    derivs = [list(Y)]
    for _ in range(n):
        derivs.append([y.derivative() for y in derivs[-1]])
    K = min(y.order for y in derivs[n])
    W = [[derivs[i][a].truncate(K) for i in range(n)] for a in range(n)]
    rhs = [derivs[n][a].truncate(K) for a in range(n)]
    if linalg.rank([[w[0] for w in row] for row in W]) < n:
        raise DegenerateOsculation("the 2m jet derivatives are not independent at 0")
    B = linalg.solve(W, rhs)
    return CurveODE(m, B, tag)


def reparametrize_curve(Y: Sequence[Jet], v: Jet) -> List[Jet]:
    return [y.compose(v) for y in Y]


def rescale_curve(Y: Sequence[Jet], g: Jet) -> List[Jet]:
    return [y * g for y in Y]


# -- gauge and parameter changes --------------------------------------------

def _conjugate(c: CurveODE, h: Jet) -> CurveODE:
    """ODE satisfied by F where E = h F."""
    n = 2 * c.m
    hd = [h]
    for _ in range(n):
        hd.append(hd[-1].derivative())
    coef = [-b for b in c.B] + [None]
    new_B = []
    hinv = h.reciprocal()
    for i in range(n):
        a = None
        for k in range(i, n + 1):
            term = hd[k - i] * binomial(k, i)
            if k < n:
                term = term * coef[k]
            a = term if a is None else a + term
        new_B.append(-a * hinv)
    return CurveODE(c.m, new_B, "arbitrary")


def rescale_section(c: CurveODE, g: Jet) -> CurveODE:
    """ODE satisfied by the section g * E."""
    return _conjugate(c, g.reciprocal())


def semi_canonical_multiplier(c: CurveODE) -> Jet:
    """g with g(0) = 1 such that g * E has vanishing B_(2m-1)."""
    b = c.B[-1]
    if b.is_zero():
        return Jet.const(b.zero + 1, b.order + 1)
    return (-(b / (2 * c.m))).integrate().exp()


def semi_canonicalize(c: CurveODE) -> CurveODE:
    """Gauge away B_(2m-1).

    Only a tagged ODE is known to have B_(2m-1) identically zero; for an
    arbitrary one a jet that merely vanishes to its order still feeds the
    unknown higher coefficients into B_0, so the gauge (and its loss of
    2m orders) is always applied.
    """
    if c.param_tag != "arbitrary":
        return c
    out = rescale_section(c, semi_canonical_multiplier(c))
    B = list(out.B)
    B[-1] = Jet.const(B[-1].zero, B[-1].order)
    return CurveODE(c.m, B, "semi_canonical")


def reparametrize(c: CurveODE, v: Jet) -> CurveODE:
    """ODE of F(tau) = E(v(tau)); ``v(0) = 0`` and ``v'(0) != 0``."""
    n = 2 * c.m
    dv = v.derivative()
    # F^{(k)} = sum_j b[k][j] * (E^{(j)} o v)
    b = [[Jet.const(dv.zero + 1, dv.order)]]
    for k in range(n):
        row = []
        for j in range(k + 2):
            term = None
            if j <= k:
                term = b[k][j].derivative()
            if j >= 1:
                extra = b[k][j - 1] * dv
                term = extra if term is None else term + extra
            row.append(term)
        b.append(row)
    Bv = [coef.compose(v) for coef in c.B]
    d = [b[n][j] + b[n][n] * Bv[j] for j in range(n)]
    # invert the lower triangular map F^{(k)} <- E^{(j)} o v, k, j < n
    cinv: List[List[Optional[Jet]]] = [[None] * n for _ in range(n)]
    for j in range(n):
        inv_diag = b[j][j].reciprocal()
        cinv[j][j] = inv_diag
        for i in range(j):
            s = None
            for l in range(i, j):
                if cinv[l][i] is None:
                    continue
                t = b[j][l] * cinv[l][i]
                s = t if s is None else s + t
            cinv[j][i] = -s * inv_diag
    new_B = []
    for i in range(n):
        s = None
        for j in range(i, n):
            t = d[j] * cinv[j][i]
            s = t if s is None else s + t
        new_B.append(s)
    return CurveODE(c.m, new_B, "arbitrary")


def _picard(step, start: Jet, max_iter: int) -> Jet:
    cur = start
    for _ in range(max_iter):
        nxt = step(cur)
        if nxt.order == cur.order and nxt == cur:
            return nxt
        cur = nxt
    return cur


def projective_normalize(c: CurveODE) -> Tuple[CurveODE, Jet]:
    """Reparametrize so that B_(2m-2) vanishes.

    Solves v'^2 B_(2m-2)(v) = m(4m^2-1)/3 * S(v) with v(0)=0, v'(0)=1,
    v''(0)=0, S the (halved) Schwarzian, then restores the semi-canonical gauge.
    """
    if not c.B[-1].is_zero():
        raise WrongGauge("projective_normalize needs a semi-canonical ODE")
    m = c.m
    Bp = c.B[-2]
    t = Jet.variable(Bp.order + 3, one=Bp.zero + 1)
    if c.param_tag in ("projective", "canonical") and Bp.is_zero():
        return CurveODE(m, c.B, "projective"), t
    k = Fraction(3, m * (4 * m * m - 1))
    kk = rat(k) if not isinstance(Bp[0], float) else float(k)
    three_quarters = rat(Fraction(3, 4)) if not isinstance(Bp[0], float) else 0.75

    def step(v: Jet) -> Jet:
        d1 = v.derivative()
        d2 = d1.derivative()
        ratio = d2 / d1
        rhs = 2 * d1 * (kk * d1 * d1 * Bp.compose(v) + three_quarters * ratio * ratio)
        return rhs.integrate().integrate(t.zero + 1).integrate()

    v = _picard(step, t, Bp.order + 6)
    out = semi_canonicalize(reparametrize(c, v))
    B = list(out.B)
    if not B[-2].is_negligible(*c.B):
        raise TruncationExceeded("projective normalization did not converge to jet order")
    B[-2] = Jet.const(B[-2].zero, B[-2].order)
    return CurveODE(m, B, "projective"), v


# -- Wilczynski invariants -----------------------------------------------------

def _wilczynski_coefficient(m: int, i: int, j: int) -> Fraction:
    # (j-1)! in the denominator: with j! the sum is not a relative invariant
    # for i >= 2 (covariance under Moebius maps fails already at m = 2).
    f = math.factorial
    return Fraction(
        (-1) ** (j - 1) * f(2 * i - j + 3) * f(2 * m - i + j - 3),
        f(i + 2 - j) * f(j - 1),
    ) * Fraction(f(i + 1), f(2 * i + 2))


def wilczynski(c: CurveODE) -> WilczynskiSet:
    if c.param_tag not in ("projective",):
        raise WrongGauge("Wilczynski invariants are read in a projective parameter")
    m = c.m
    out = []
    exact = not isinstance(c.B[0][0], float)
    for i in range(1, 2 * m - 1):
        acc = None
        for j in range(1, i + 1):
            coef = _wilczynski_coefficient(m, i, j)
            coef = rat(coef) if exact else float(coef)
            term = c.B[2 * m - 3 - i + j].derivative(j - 1) * coef
            acc = term if acc is None else acc + term
        out.append(acc)
    return WilczynskiSet(m, tuple(out))


def wilczynski_forms(c: CurveODE) -> WilczynskiSet:
    """Wilczynski invariants evaluated on d/dt of the ODE's own parameter.

    Normalizes to a projective parameter tau (t = v(tau)), computes W_i there
    and pulls back: A_i(t) = W_i(u(t)) u'(t)^{i+2} with u the inverse of v.
    """
    sc = semi_canonicalize(c)
    proj, v = projective_normalize(sc)
    W = wilczynski(proj)
    u = v.revert()
    du = u.derivative()
    forms = []
    for i in W.indices():
        forms.append(W[i].compose(u) * du ** (i + 2))
    return WilczynskiSet(c.m, tuple(forms))


def self_dual_test(c: CurveODE) -> Tuple[bool, Optional[int]]:
    W = wilczynski(c)
    for i, w in W.odd().items():
        # W_i involves derivatives of B up to order i - 1
        if not w.is_negligible(*c.B, derivs=i - 1):
            return False, i
    return True, None


# -- symplectic structure -----------------------------------------------------

def invariant_symplectic_form(c: CurveODE) -> SympForm:
    """The constant form making span{E, ..., E^{(m-1)}} Lagrangian for all t.

    Normalized by sigma(E^{(m)}, E^{(m-1)})(0) = 1.
    """
    m, n = c.m, 2 * c.m
    Y = fundamental_solutions(c)
    derivs = [Y]
    for _ in range(m - 1):
        derivs.append([y.derivative() for y in derivs[-1]])
    unknowns = [(a, b) for a in range(n) for b in range(a + 1, n)]
    rows = []
    for i in range(m):
        for j in range(i + 1, m):
            K = min(y.order for y in derivs[j])
            for k in range(K + 1):
                row = []
                for a, b in unknowns:
                    p = derivs[i][a] * derivs[j][b] - derivs[i][b] * derivs[j][a]
                    row.append(p[k])
                rows.append(row)
    zero = c.B[0].zero
    if rows:
        ker = linalg.kernel(rows)
    else:
        ker = [[zero + 1]]
    if not ker:
        raise NotSelfDual("no constant form makes the osculating spaces Lagrangian")
    if len(ker) > 1:
        raise TruncationExceeded("jet order too small to pin down the invariant form")
    vec = ker[0]
    M = [[zero] * n for _ in range(n)]
    for (a, b), x in zip(unknowns, vec):
        M[a][b] = x
        M[b][a] = -x
    pivot = M[m][m - 1]
    if is_zero(pivot):
        raise DegenerateForm("sigma(E^(m), E^(m-1)) vanishes")
    M = [[x / pivot for x in row] for row in M]
    if linalg.rank(M) < n:
        raise DegenerateForm("invariant form is degenerate")
    return SympForm(tuple(tuple(r) for r in M))


def strongly_canonical_scale(c: CurveODE, form: SympForm) -> StrongScale:
    """Rescale the section by a constant so that |sigma(E^(m), E^(m-1))| = 1.

    The ODE is unchanged (constant rescaling); ``scale`` multiplies E.  The
    orientation flag is the sign of sigma(E^(m), E^(m-1)); -1 means the
    parameter must be reversed to reach the oriented normalization.
    """
    m = c.m
    val = form(m, m - 1)
    if is_zero(val):
        raise DegenerateForm("sigma(E^(m), E^(m-1)) vanishes")
    mag = abs(val)
    scale_sq = 1 / mag
    try:
        scale = exact_root(scale_sq, 2)
    except ArithmeticError:
        scale = math.sqrt(float(scale_sq))
    return StrongScale(c, scale, scale_sq, form.scaled(scale_sq), sign(val))


# -- symplectic curvatures ------------------------------------------------------

def _leibniz_terms(m: int):
    """(i, l, j, coeff): rho_i^{(l)} contributes coeff to B_j."""
    for i in range(1, m + 1):
        k = m - i
        for l in range(k + 1):
            yield i, l, 2 * k - l, (-1) ** (i + 1) * binomial(k, l)


def ode_from_curvatures(rho: Sequence, order: Optional[int] = None) -> CurveODE:
    """Expand E^{(2m)} = sum (-1)^{i+1} D^{m-i}(rho_i D^{m-i} E)."""
    m = len(rho)
    jets = []
    for r in rho:
        if isinstance(r, Jet):
            jets.append(r)
        else:
            if order is None:
                raise InputError("constant curvatures need an explicit jet order")
            r = r if isinstance(r, float) else rat(r)
            jets.append(Jet.const(r, order))
    zero = jets[0].zero
    K = min(j.order for j in jets) - max(0, 2 * (m - 1) - (m - 1))
    B: List[Optional[Jet]] = [None] * (2 * m)
    for i, l, j, coeff in _leibniz_terms(m):
        term = jets[i - 1].derivative(l) * coeff
        B[j] = term if B[j] is None else B[j] + term
    K = min(b.order for b in B if b is not None)
    B = [Jet.const(zero, K) if b is None else b.truncate(K) for b in B]
    return CurveODE(m, B, "semi_canonical")


def symplectic_curvatures(c: CurveODE) -> CurvatureTuple:
    """Match B against the self-adjoint normal form, from rho_1 downwards."""
    if not c.B[-1].is_zero():
        raise WrongGauge("symplectic curvatures need B_(2m-1) = 0")
    m = c.m
    terms = list(_leibniz_terms(m))
    rho: List[Optional[Jet]] = [None] * m
    for i in range(1, m + 1):
        j_top = 2 * (m - i)
        acc = c.B[j_top]
        for i2, l, j, coeff in terms:
            if j == j_top and i2 < i:
                acc = acc - rho[i2 - 1].derivative(l) * coeff
        rho[i - 1] = acc * (-1) ** (i + 1)
    # every remaining coefficient must be reproduced
    rebuilt: Dict[int, Jet] = {}
    for i, l, j, coeff in terms:
        term = rho[i - 1].derivative(l) * coeff
        rebuilt[j] = term if j not in rebuilt else rebuilt[j] + term
    # B_j is rebuilt from up to 2(m-1) - j derivatives of the rho
    for j in range(2 * m):
        expected = rebuilt.get(j)
        derivs = max(0, 2 * (m - 1) - j)
        if expected is None:
            if not c.B[j].is_negligible(*c.B):
                raise NotSelfDual(f"B_{j} has no counterpart in the self-adjoint form")
            continue
        if not (c.B[j] - expected).is_negligible(*c.B, derivs=derivs):
            raise NotSelfDual(f"B_{j} violates the self-adjoint form")
    return CurvatureTuple(m, tuple(rho))


# -- canonical parametrization ----------------------------------------------

def first_nonvanishing_even(forms: WilczynskiSet) -> Tuple[Optional[int], Optional[Jet]]:
    for i0 in range(1, forms.m):
        A = forms[2 * i0]
        if not is_zero(A[0], 1e-9):
            return i0, A
    return None, None


def canonical_parametrization(c: CurveODE) -> Tuple[CurveODE, Jet, int, int]:
    """Reparametrize so that the lowest nonzero even invariant equals +-1.

    Returns (ODE in the new parameter, v with t = v(tau), i0, epsilon).
    """
    sc = semi_canonicalize(c)
    forms = wilczynski_forms(sc)
    for i, w in forms.odd().items():
        if not w.is_negligible(*sc.B):
            raise NotSelfDual(f"odd Wilczynski invariant W_{i} does not vanish")
    i0, A = first_nonvanishing_even(forms)
    if i0 is None:
        raise AllInvariantsVanish("all Wilczynski invariants vanish at the base point: rational normal curve")
    eps = sign(A[0])
    weight = 2 * i0 + 2
    EA = A * eps
    expo = Fraction(-1, weight)
    t = Jet.variable(A.order + 1, one=A.zero + 1)

    def step(v: Jet) -> Jet:
        return EA.compose(v).power(expo).integrate()

    v = _picard(step, EA.truncate(0).power(expo)[0] * t, A.order + 3)
    out = semi_canonicalize(reparametrize(sc, v))
    return CurveODE(c.m, out.B, "canonical"), v, i0, eps


def orientation_flip(c: CurveODE) -> CurveODE:
    """Reverse the parameter, t -> -t."""
    n = 2 * c.m
    B = [b.compose(-Jet.variable(b.order, one=b.zero + 1)) * (-1) ** (n - i) for i, b in enumerate(c.B)]
    return CurveODE(c.m, B, c.param_tag)
