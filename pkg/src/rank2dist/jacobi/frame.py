"""Canonical frame of a model system and its structure equations at one point.

The frame lives on the annihilator (D^2)^perp, charted by (q, p_y0, ...,
p_y(m-2), p_z); the remaining momenta are solved from u1 = u2 = u3 = 0.
Coefficients of every frame field are truncated multivariate series at the
base point.  They do not depend on x or z (both translations are
symmetries of the models), so only the other 2m + 1 chart coordinates are
series variables.

Construction:
  h      = C / (-u5), the characteristic field in the velocity parametrization
  v0     vertical field spanning V^(1-m) modulo the Euler field e
  eps~   = f v0 with f^2 sigma((ad h)^m v0, (ad h)^(m-1) v0) constant
  eps_1  = eps~ + mu e, mu fixed by [eps_1, [h, eps_1]] in span{e, h, eps_1}
  eps_i  = (ad h)^(i-1) eps_1,  eta = [eps_1, eps_2m]

The constant in f is left free: every relation checked here is invariant
under eps_1 -> c eps_1.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ..errors import DegenerateDistribution, InconsistentSystem, InputError
from ..exactalg import linalg
from ..exactalg.mpoly import MPoly
from ..exactalg.mseries import MSeries
from ..exactalg.scalars import rat, to_json
from ..models import build_model, cotangent_lift

Field = List[MSeries]


@dataclass
class AnnihilatorChart:
    n: int
    prec: int
    iota: List[MPoly]  # chart -> T*M, 2n polynomials in the chart coordinates
    free_momenta: List[int]  # T*M indices of the momenta kept as coordinates
    active: List[int]  # chart indices that are series variables
    base: List  # base point in chart coordinates

    @property
    def dim(self) -> int:
        return len(self.iota) // 2 + len(self.free_momenta)

    @property
    def chart_to_tstar(self) -> List[int]:
        return list(range(self.n)) + self.free_momenta

    def series(self, p: MPoly) -> MSeries:
        """A polynomial on the chart as a series in the active displacements."""
        nv = len(self.active)
        images = []
        for k in range(self.dim):
            if k in self.active:
                images.append(MPoly.var(self.active.index(k), nv) + MPoly.const(self.base[k], nv))
            else:
                if p.diff(k):
                    raise InputError("frame coefficients depend on x or z")
                images.append(MPoly.const(self.base[k], nv))
        return MSeries.from_mpoly(p.substitute(images), self.prec)

    def pull(self, p: MPoly) -> MSeries:
        """A polynomial on T*M restricted to the annihilator."""
        return self.series(p.substitute(self.iota))

    def tangent_field(self, comps: Sequence[MPoly]) -> Field:
        """Chart components of a T*M field tangent to the annihilator."""
        return [self.pull(comps[k]) for k in self.chart_to_tstar]

    def push(self, v: Field) -> Field:
        """T*M components of a chart field (d iota applied to v)."""
        out = []
        for a in range(2 * self.n):
            if a in self.chart_to_tstar:
                out.append(v[self.chart_to_tstar.index(a)])
                continue
            acc = None
            for k in self.active:
                d = self.iota[a].diff(k)
                if d:
                    term = self.series(d) * v[k]
                    acc = term if acc is None else acc + term
            out.append(acc if acc is not None else v[0] * 0)
        return out


def frame_chart(cs, prec: int) -> AnnihilatorChart:
    """Chart of (D^2)^perp for the models, centred at q = 0, p = dz.

    On the annihilator p_ym = 0, p_y(m-1) = -2 y_m p_z, and p_x is solved
    from u1 = 0.
    """
    n, m = cs.n, cs.n - 3
    dim = n + m
    free = [n + 1 + i for i in range(m - 1)] + [2 * n - 1]  # p_y0..p_y(m-2), p_z
    cvar = lambda k: MPoly.var(k, dim)
    # chart index of a free momentum
    pz = cvar(n + m - 1)
    py = {i: cvar(n + i) for i in range(m - 1)}
    ym = cvar(1 + m)
    p_full: Dict[int, MPoly] = {n + 1 + i: py[i] for i in range(m - 1)}
    p_full[2 * n - 1] = pz
    p_full[n + 1 + m] = MPoly.zero(dim)  # p_ym
    p_full[n + m] = ym * pz * rat(-2)  # p_y(m-1)
    # u1 = p_x + (rest) = 0 fixes p_x
    X1 = cs.X[0]
    rest = MPoly.zero(dim)
    qs = [cvar(k) for k in range(n)]
    for k in range(1, n):
        comp = X1.comps[k]
        if comp:
            rest = rest + comp.substitute(qs) * p_full[n + k]
    if X1.comps[0] != MPoly.const(rat(1), n):
        raise DegenerateDistribution("frame chart expects X1 = d_x + ...")
    p_full[n] = -rest
    iota = qs + [p_full[n + k] for k in range(n)]
    for i in range(3):
        if cs.u[i].substitute(iota):
            raise DegenerateDistribution("chart does not parametrize the annihilator")
    base = [rat(0)] * dim
    base[dim - 1] = rat(1)
    active = [k for k in range(dim) if k not in (0, n - 1)]
    return AnnihilatorChart(n, prec, iota, free, active, base)


# -- field algebra ------------------------------------------------------------

def bracket(chart: AnnihilatorChart, X: Field, Y: Field) -> Field:
    """[X, Y]^a = X(Y^a) - Y(X^a), derivatives along the active coordinates."""
    out = []
    for a in range(chart.dim):
        acc = None
        for j, k in enumerate(chart.active):
            term = X[k] * Y[a].diff(j) - Y[k] * X[a].diff(j)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def combine(coeffs: Sequence, fields: Sequence[Field]) -> Field:
    out = None
    for c, F in zip(coeffs, fields):
        term = [c * x for x in F]
        out = term if out is None else [a + b for a, b in zip(out, term)]
    return out


def values(F: Field) -> list:
    return [x.lead() for x in F]


def sigma(chart: AnnihilatorChart, v: Field, w: Field) -> MSeries:
    """Canonical symplectic form of T*M on chart fields."""
    n = chart.n
    V, W = chart.push(v), chart.push(w)
    s = V[n] * W[0] - W[n] * V[0]
    for k in range(1, n):
        s = s + V[n + k] * W[k] - W[n + k] * V[k]
    return s


def _decompose(fields: Sequence[Field], target: Field) -> list:
    """Series coefficients c with target = sum c_i fields_i (exact system)."""
    A = [[F[a] for F in fields] for a in range(len(target))]
    return linalg.solve(A, list(target))


# -- report ---------------------------------------------------------------------

@dataclass
class FrameReport:
    n: int
    r: tuple
    prec: int
    frame_rank: int
    eh: list
    e_eps: Dict[int, list]
    he2m_coeffs: Dict[str, object]
    he2m_residual: list
    he2m_expected: Dict[str, object]
    gram: Dict[str, object]
    gram_residual: Dict[str, list]
    gram_pattern_ok: bool
    normalization_residual: object
    mu0: object
    sign_flip_all_zero: bool = False
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def all_zero(self) -> bool:
        zero = lambda xs: all(x == 0 for x in xs)
        return (
            self.frame_rank == 2 * self.n - 3
            and zero(self.eh)
            and all(zero(v) for v in self.e_eps.values())
            and zero(self.he2m_residual)
            and all(zero(v) for v in self.gram_residual.values())
            and self.gram_pattern_ok
            and self.normalization_residual == 0
        )

    def to_json(self) -> dict:
        js = lambda xs: [to_json(x) for x in xs]
        return {
            "n": self.n,
            "r": js(self.r),
            "series_degree": self.prec,
            "frame_rank": self.frame_rank,
            "residuals": {
                "[e,h]": js(self.eh),
                "[e,eps_i]+eps_i/2": {str(i): js(v) for i, v in self.e_eps.items()},
                "[h,eps_2m]-sum": js(self.he2m_residual),
                "[eps_i,eps_j]-d_ij eta": {k: js(v) for k, v in self.gram_residual.items()},
                "normalization": to_json(self.normalization_residual),
            },
            "he2m_coefficients": {k: to_json(v) for k, v in self.he2m_coeffs.items()},
            "he2m_expected": {k: to_json(v) for k, v in self.he2m_expected.items()},
            "gram": {k: to_json(v) for k, v in self.gram.items()},
            "gram_pattern_ok": self.gram_pattern_ok,
            "mu_at_base": to_json(self.mu0),
            "sign_flip_all_zero": self.sign_flip_all_zero,
            "all_zero": self.all_zero,
            "timings": {k: round(v, 3) for k, v in self.timings.items()},
        }


def _vertical_flag(chart, h: Field, V: List[Field], m: int) -> List[Field]:
    """Basis of V^(1-m): v in V^(-i) with [h, v] in V^(-i) + span{h} recursively."""
    S = V
    for _ in range(m - 2):
        images = [bracket(chart, h, b) for b in S]
        cols = images + S + [h]
        A = [[F[a] for F in cols] for a in range(chart.dim)]
        ker = linalg.kernel(A)
        S = [combine(k[: len(S)], S) for k in ker if any(not x.is_zero() for x in k[: len(S)])]
        S = [F for F in S if any(not x.is_zero() for x in F)]
    return S


def _pick_v0(S: List[Field], e: Field) -> Field:
    e0 = values(e)
    for b in S:
        if linalg.rank([e0, values(b)]) == 2:
            return b
    raise DegenerateDistribution("vertical flag collapses onto the Euler field")


def default_degree(n: int) -> int:
    m = n - 3
    return 4 * m + 2 * max(0, m - 2)


def verify_frame_relations(n: int, r: Sequence, prec: Optional[int] = None) -> FrameReport:
    """Build the normalized frame at the default point and evaluate its brackets there."""
    spec = build_model(n, r)
    m = spec.m
    cs = cotangent_lift(spec)
    N = prec if prec is not None else default_degree(n)
    t0 = time.perf_counter()
    timings: Dict[str, float] = {}
    chart = frame_chart(cs, N)
    D = chart.dim
    e = chart.tangent_field(cs.euler.comps)
    C = chart.tangent_field(cs.C.comps)
    u5 = chart.pull(cs.u[4])
    h = [c * (-u5).reciprocal() for c in C]
    nv = len(chart.active)
    zero = MSeries.const(rat(0), nv, N)
    one = MSeries.const(rat(1), nv, N)
    V = []
    for k in range(n, D):
        V.append([one if a == k else zero for a in range(D)])
    timings["setup"] = time.perf_counter() - t0

    S = _vertical_flag(chart, h, V, m)
    v0 = _pick_v0(S, e)
    A = [v0]
    for _ in range(m):
        A.append(bracket(chart, h, A[-1]))
    s0 = sigma(chart, A[m], A[m - 1])
    if s0.lead() == 0:
        raise DegenerateDistribution("sigma(E^(m), E^(m-1)) vanishes at the base point")
    f = (s0 / s0.lead()).power(rat(-1) / 2)
    eps_t = [f * x for x in v0]
    timings["section"] = time.perf_counter() - t0

    # normalization: [eps~, [h, eps~]] = a e + b h + c eps~ + k [h, eps~]
    P = bracket(chart, h, eps_t)
    Q = bracket(chart, eps_t, P)
    _, _, _, k = _decompose([e, h, eps_t, P], Q)
    mu = k * 2
    eps1 = [a + mu * b for a, b in zip(eps_t, e)]
    P1 = bracket(chart, h, eps1)
    Q1 = bracket(chart, eps1, P1)
    norm_res = _decompose([e, h, eps1, P1], Q1)[3].lead()
    timings["normalization"] = time.perf_counter() - t0

    # Z2: first nonzero coordinate of eps_1 at the base point is positive
    lead = next(x for x in values(eps1) if x != 0)
    if lead < 0:
        eps1 = [-x for x in eps1]
    rel = _relations(chart, e, h, eps1, spec.r, m)
    timings["brackets"] = time.perf_counter() - t0
    flipped = _relations(chart, e, h, [-x for x in eps1], spec.r, m)
    return FrameReport(
        n=n,
        r=spec.r,
        prec=N,
        normalization_residual=norm_res,
        mu0=mu.lead(),
        sign_flip_all_zero=flipped.pop("all_zero"),
        timings=timings,
        **{k: v for k, v in rel.items() if k != "all_zero"},
    )


def _relations(chart, e: Field, h: Field, eps1: Field, r: Sequence, m: int) -> dict:
    """Structure equations of the frame generated by eps_1, at the base point."""
    eps = [eps1]
    for _ in range(2 * m - 1):
        eps.append(bracket(chart, h, eps[-1]))
    eta = bracket(chart, eps[0], eps[-1])

    basis = [e, h] + eps + [eta]
    B0 = [values(F) for F in basis]
    rank = linalg.rank(B0)
    names = ["e", "h"] + [f"eps{i}" for i in range(1, 2 * m + 1)] + ["eta"]
    Bt = linalg.transpose(B0)

    def coords(vec):
        try:
            return linalg.solve(Bt, vec)
        except InconsistentSystem as exc:
            raise DegenerateDistribution("frame does not span at the base point") from exc

    eh = values(bracket(chart, e, h))
    e_eps = {}
    for i, F in enumerate(eps, start=1):
        br = bracket(chart, e, F)
        e_eps[i] = [a + b / 2 for a, b in zip(values(br), values(F))]
    c_he = coords(values(bracket(chart, h, eps[-1])))
    # [h, eps_2m] = sum_{i=1}^{m} (-1)^(i+1) r_i eps_(2(m-i)+1)
    expected = [rat(0)] * len(basis)
    for i in range(1, m + 1):
        expected[2 + 2 * (m - i)] += (-1) ** (i + 1) * r[i - 1]
    he2m_res = [a - b for a, b in zip(c_he, expected)]

    gram, gram_res = {}, {}
    ok = True
    for i in range(1, 2 * m + 1):
        for j in range(i + 1, 2 * m + 1):
            c = coords(values(bracket(chart, eps[i - 1], eps[j - 1])))
            key = f"{i},{j}"
            gram[key] = c[-1]
            gram_res[key] = c[:-1]
            if i + j <= 2 * m and c[-1] != 0:
                ok = False
            if i + j == 2 * m + 1 and c[-1] != (-1) ** (i - 1):
                ok = False
    zero = lambda xs: all(x == 0 for x in xs)
    return dict(
        frame_rank=rank,
        eh=eh,
        e_eps=e_eps,
        he2m_coeffs=dict(zip(names, c_he)),
        he2m_residual=he2m_res,
        he2m_expected={k: v for k, v in zip(names, expected) if v != 0},
        gram=gram,
        gram_residual=gram_res,
        gram_pattern_ok=ok,
        all_zero=rank == len(basis)
        and zero(eh)
        and all(zero(v) for v in e_eps.values())
        and zero(he2m_res)
        and all(zero(v) for v in gram_res.values())
        and ok,
    )
