"""Model systems A_(r), D_(r) and their lift to the cotangent bundle.

Coordinates on M are (x, y_0, ..., y_m, z) with m = n - 3; the cotangent
bundle carries momenta p_x, p_y0, ..., p_z, so points are (q, p) with
q and p of length n.  The symplectic form is sigma = sum dp_k ^ dq_k, i.e.

    sigma(v, w) = v_p . w_q - w_p . v_q,

and the Hamiltonian field of h is (h_p, -h_q), so that sigma(H_h, .) = -dh.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import (
    BadDimension,
    DegenerateDistribution,
    DimensionMismatch,
    EmptyIntersection,
    InputError,
    OnD3Annihilator,
)
from .exactalg import linalg
from .exactalg.mpoly import MPoly, PolyVF, lie_bracket
from .exactalg.scalars import is_zero, rat, to_json


def model_names(n: int) -> List[str]:
    return ["x"] + [f"y{i}" for i in range(n - 2)] + ["z"]


@dataclass(frozen=True)
class ModelSpec:
    n: int
    r: tuple
    X1: PolyVF
    X2: PolyVF
    names: tuple

    @property
    def m(self) -> int:
        return self.n - 3

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": [to_json(x) for x in self.r],
            "X1": [c.to_string(self.names) for c in self.X1.comps],
            "X2": [c.to_string(self.names) for c in self.X2.comps],
        }


def build_model(n: int, r: Sequence) -> ModelSpec:
    """X1 = d_x + sum y_{i+1} d_{y_i} + (y_m^2 + sum r_i y_{m-i}^2) d_z, X2 = d_{y_m}."""
    if not isinstance(n, int) or n < 5:
        raise BadDimension("the model systems need n >= 5")
    m = n - 3
    if len(r) != m:
        raise BadDimension(f"n = {n} needs a tuple of length {m}, got {len(r)}")
    r = tuple(rat(x) for x in r)
    names = model_names(n)
    y = lambda i: MPoly.var(1 + i, n)
    comps = [MPoly.const(rat(1), n)]
    comps += [y(i + 1) for i in range(m)]
    comps.append(MPoly.zero(n))  # d_{y_m}
    drift = y(m) ** 2
    for i, ri in enumerate(r, start=1):
        drift = drift + y(m - i) ** 2 * ri
    comps.append(drift)
    X1 = PolyVF(comps)
    X2 = PolyVF.coordinate(1 + m, n)
    return ModelSpec(n, r, X1, X2, tuple(names))


# -- growth vector ----------------------------------------------------------

def _span_dim(fields: Sequence[PolyVF], q: Sequence) -> int:
    if not fields:
        return 0
    return linalg.rank([f.evaluate(q) for f in fields])


def growth_vector(X1: PolyVF, X2: PolyVF, q: Sequence) -> List[int]:
    """dim D^k(q) for k = 1, 2, ... until full rank or stabilization.

    D^{k+1} is spanned by D^k and brackets of X1, X2 with the level-k
    generators (right-normed Lie words).
    """
    if X1.nvars != X2.nvars or len(q) != X1.nvars:
        raise DimensionMismatch("fields and point must share the coordinates")
    q = [rat(x) for x in q]
    nv = X1.nvars
    all_fields = [X1, X2]
    level = [X2]  # new generators at the last level ([X1, X1] = 0)
    dims = [_span_dim(all_fields, q)]
    while dims[-1] < nv:
        nxt = []
        for base in (X1, X2):
            for w in level:
                b = lie_bracket(base, w)
                if not b.is_zero():
                    nxt.append(b)
        if not nxt:
            break
        all_fields += nxt
        d = _span_dim(all_fields, q)
        if d == dims[-1]:
            break
        dims.append(d)
        level = nxt
    return dims


# -- cotangent lift -----------------------------------------------------------

def _embed(poly: MPoly, n: int) -> MPoly:
    """Polynomial on M as a polynomial on T*M (momenta appended)."""
    return MPoly(2 * n, {e + (0,) * n: c for e, c in poly.terms.items()})


def momentum_pairing(X: PolyVF) -> MPoly:
    """u = p . X(q)."""
    n = X.nvars
    out = MPoly.zero(2 * n)
    for k, comp in enumerate(X.comps):
        if comp:
            out = out + _embed(comp, n) * MPoly.var(n + k, 2 * n)
    return out


def hamiltonian_field(h: MPoly, n: int) -> PolyVF:
    comps = [h.diff(n + k) for k in range(n)] + [-h.diff(k) for k in range(n)]
    return PolyVF(comps)


def poisson(f: MPoly, g: MPoly, n: int) -> MPoly:
    """{f, g} = H_f(g); with this sign {p.X, p.Y} = p.[X, Y]."""
    return hamiltonian_field(f, n).apply(g)


def euler_field(n: int) -> PolyVF:
    zero = MPoly.zero(2 * n)
    return PolyVF([zero] * n + [MPoly.var(n + k, 2 * n) for k in range(n)])


def symplectic_pairing(v: Sequence, w: Sequence, n: int):
    """sigma(v, w) = v_p . w_q - w_p . v_q for tangent vectors at one point."""
    s = v[n] * w[0] - w[n] * v[0]
    for k in range(1, n):
        s = s + v[n + k] * w[k] - w[n + k] * v[k]
    return s


@dataclass(frozen=True)
class CotangentSystem:
    n: int
    X: Tuple[PolyVF, ...]  # X1..X5 on M
    u: Tuple[MPoly, ...]  # u1..u5 on T*M
    C: PolyVF
    euler: PolyVF
    names: tuple
    spec: Optional[ModelSpec] = None

    @property
    def m(self) -> int:
        return self.n - 3

    @property
    def all_names(self) -> List[str]:
        return list(self.names) + [f"p_{s}" for s in self.names]

    def du(self, i: int) -> List[MPoly]:
        """Gradient of u_i (1-based) over all 2n coordinates."""
        return [self.u[i - 1].diff(k) for k in range(2 * self.n)]

    def u_values(self, point: Sequence) -> list:
        return [u.evaluate(point) for u in self.u]

    def to_json(self) -> dict:
        names = self.all_names
        return {
            "n": self.n,
            "u": [u.to_string(names) for u in self.u],
            "C": [c.to_string(names) for c in self.C.comps],
        }


def cotangent_lift(X1, X2=None, q: Optional[Sequence] = None) -> CotangentSystem:
    """Quasi-impulses u_1..u_5 and the characteristic field u4 H(u2) - u5 H(u1).

    Accepts a ModelSpec or a pair of polynomial fields.  When a working
    point ``q`` is given, dim D^2(q) = 3 is checked there.
    """
    spec = None
    if isinstance(X1, ModelSpec):
        spec = X1
        X1, X2, names = spec.X1, spec.X2, spec.names
    else:
        names = tuple(f"x{i}" for i in range(X1.nvars))
    if X2 is None or X1.nvars != X2.nvars:
        raise DimensionMismatch("need two fields on the same space")
    n = X1.nvars
    X3 = lie_bracket(X1, X2)
    X4 = lie_bracket(X1, X3)
    X5 = lie_bracket(X2, X3)
    if q is not None:
        q = [rat(x) for x in q]
        if _span_dim([X1, X2, X3], q) < 3:
            raise DegenerateDistribution("dim D^2 < 3 at the working point")
    u = tuple(momentum_pairing(X) for X in (X1, X2, X3, X4, X5))
    H1, H2 = hamiltonian_field(u[0], n), hamiltonian_field(u[1], n)
    C = H2.scale(u[3]) - H1.scale(u[4])
    return CotangentSystem(n, (X1, X2, X3, X4, X5), u, C, euler_field(n), tuple(names), spec)


# -- working points ------------------------------------------------------------

def default_point(cs: CotangentSystem, q: Optional[Sequence] = None) -> List:
    """q (default origin) and p = (0, ..., 0, 1) projected onto u1 = u2 = u3 = 0.

    The correction only touches pivot momenta of the constraint matrix, so
    for the models at the origin p is returned unchanged.
    """
    n = cs.n
    q = [rat(0)] * n if q is None else [rat(x) for x in q]
    A = [X.evaluate(q) for X in cs.X[:3]]
    p = [rat(0)] * (n - 1) + [rat(1)]
    resid = [linalg.dot(row, p) for row in A]
    if any(x != 0 for x in resid):
        R, piv = linalg.rref([row + [-r] for row, r in zip(A, resid)], cols=range(n))
        for row, c in zip(R, piv):
            p[c] += row[-1]
        if any(linalg.dot(row, p) != 0 for row in A):
            raise DegenerateDistribution("cannot place the default point on the annihilator")
    point = q + p
    u = cs.u_values(point)
    if u[3] == 0 and u[4] == 0:
        raise OnD3Annihilator("default point lies on the annihilator of D^3")
    return point


def check_annihilator(cs: CotangentSystem, point: Sequence) -> list:
    if len(point) != 2 * cs.n:
        raise DimensionMismatch(f"point must have {2 * cs.n} coordinates")
    u = cs.u_values(point)
    if any(not is_zero(x) for x in u[:3]):
        raise InputError("point is not on the annihilator u1 = u2 = u3 = 0")
    if is_zero(u[3]) and is_zero(u[4]):
        raise OnD3Annihilator("u4 = u5 = 0: point lies on the annihilator of D^3")
    return u


# -- admissible velocities ---------------------------------------------------------

@dataclass(frozen=True)
class Velocity:
    vector: list
    control: object


def regular_line_velocity(ms: ModelSpec, q: Sequence, line: Sequence) -> Velocity:
    """Intersection of span{line} with the affine set {X1(q) + u X2(q)}."""
    q = [rat(x) for x in q]
    a, b = ms.X1.evaluate(q), ms.X2.evaluate(q)
    line = [rat(x) for x in line]
    if len(line) != ms.n:
        raise DimensionMismatch("line direction has wrong dimension")
    if all(x == 0 for x in line):
        raise InputError("line direction is zero")
    cols = [[ai, bi] for ai, bi in zip(a, b)]
    try:
        alpha, beta = linalg.solve(cols, line)
    except ArithmeticError as exc:
        raise InputError("line is not contained in D(q)") from exc
    if alpha == 0:
        raise EmptyIntersection("the line is parallel to the affine velocity set")
    u = beta / alpha
    return Velocity([ai + u * bi for ai, bi in zip(a, b)], u)


# -- regularity ----------------------------------------------------------------

@dataclass(frozen=True)
class RegularityReport:
    regular: bool
    osculation_dims: list
    target: int

    def to_json(self) -> dict:
        return {"regular": self.regular, "osculation_dims": self.osculation_dims, "target": self.target}


def regular_point_test(cs: CotangentSystem, point: Sequence, order: Optional[int] = None) -> RegularityReport:
    """Osculation dims of the lifted distribution along the extremal.

    The lifted distribution has dimension n - 1 inside the (2n - 4)-space
    T(D^2)^perp cut by the skew complement of the Euler field; the point is
    regular when n - 3 successive derivatives fill it.
    """
    n = cs.n
    target = 2 * n - 4
    if len(point) != 2 * n:
        raise DimensionMismatch(f"point must have {2 * n} coordinates")
    q = point[:n]
    if growth_vector(cs.X[0], cs.X[1], q)[:2] != [2, 3]:
        return RegularityReport(False, [], target)
    check_annihilator(cs, point)
    from .jacobi.flow import flow_jet, lifted_frame

    K = order if order is not None else 2 * (n - 3) + 2
    flow = flow_jet(cs, point, K)
    frame = lifted_frame(cs, flow)
    dims = linalg_osculation_dims(frame, n - 3)
    return RegularityReport(dims[-1] == target and dims == list(range(n - 1, target + 1)), dims, target)


def linalg_osculation_dims(frame: Sequence[Sequence], steps: int) -> List[int]:
    """dims of span{frame^(k)(0), k <= i} for i = 0..steps (frame: rows x cols jets)."""
    cols = [list(c) for c in zip(*frame)]
    vecs: list = []
    dims = []
    cur = cols
    for i in range(steps + 1):
        vecs += [[x[0] for x in c] for c in cur]
        dims.append(linalg.rank(vecs))
        if i < steps:
            cur = [[x.derivative() for x in c] for c in cur]
    return dims
