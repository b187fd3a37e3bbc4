"""From the lifted distribution to the Jacobi curve, its ODE and its curvatures."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ..errors import (
    DegenerateOsculation,
    ExceptionalTuple,
    InputError,
    NotRegularPoint,
    RankDropAlongCurve,
    TruncationExceeded,
)
from ..classify import is_exceptional
from ..exactalg import linalg
from ..exactalg.jet import Jet
from ..exactalg.scalars import convert, is_zero, sign, to_json
from ..models import (
    CotangentSystem,
    build_model,
    check_annihilator,
    cotangent_lift,
    default_point,
    linalg_osculation_dims,
    symplectic_pairing,
)
from ..projcurve import (
    CurvatureTuple,
    CurveODE,
    canonical_parametrization,
    curve_ode,
    first_nonvanishing_even,
    orientation_flip,
    reparametrize,
    semi_canonicalize,
    symplectic_curvatures,
    wilczynski_forms,
)
from .flow import FlowJet, flow_jet, lifted_frame


@dataclass(frozen=True)
class JacobiJet:
    m: int
    frame: tuple  # 2m rows x m columns of jets, coordinates in the W basis
    omega: tuple  # 2m x 2m constant form
    w_basis: tuple  # the 2m vectors of T_lambda0 representing W
    full_dims: tuple  # osculation dims of the (n-1)-dim lift in T_lambda0

    @property
    def order(self) -> int:
        return min(x.order for row in self.frame for x in row)

    def columns(self) -> List[List[Jet]]:
        return [list(c) for c in zip(*self.frame)]

    def isotropy_residuals(self) -> List[Jet]:
        cols = self.columns()
        out = []
        for i in range(len(cols)):
            for j in range(i + 1, len(cols)):
                out.append(linalg.bilinear(cols[i], self.omega, cols[j]))
        return out

    def is_isotropic(self) -> bool:
        ref = [x for row in self.frame for x in row]
        return all(r.is_negligible(*ref) for r in self.isotropy_residuals())

    def osculation_dims(self) -> List[int]:
        return linalg_osculation_dims(self.frame, self.m)


def jacobi_curve(cs: CotangentSystem, point: Sequence, K: int, backend: str = "exact", flow: Optional[FlowJet] = None) -> JacobiJet:
    """The Jacobi curve through ``point`` as a moving Lagrangian frame in W.

    W is realized as a complement of span{C, e} inside the (2n - 4)-space
    T(D^2)^perp cut by the skew complement of e, spanned by kernel vectors
    chosen in pivot order.
    """
    check_annihilator(cs, point)
    n, m, N = cs.n, cs.m, 2 * cs.n
    flow = flow or flow_jet(cs, point, K, backend)
    lam = list(flow.center)
    zero = lam[0] - lam[0]
    frame_full = lifted_frame(cs, flow)
    full_dims = linalg_osculation_dims(frame_full, m)
    if full_dims != list(range(n - 1, 2 * n - 3)):
        raise NotRegularPoint(f"osculation dims {full_dims} do not reach {2 * n - 4}")
    # K-space at lambda0: du1, du2, du3 and sigma(., e) = -p . dpi
    rows = [[convert(d.evaluate(lam), backend) if d else zero for d in cs.du(i)] for i in (1, 2, 3)]
    rows.append([-x for x in lam[n:]] + [zero] * n)
    kspace = linalg.kernel(rows)
    if len(kspace) != N - 4:
        raise NotRegularPoint("T(D^2)^perp cut by e^perp has the wrong dimension")
    Cv = [convert(c.evaluate(lam), backend) if c else zero for c in cs.C.comps]
    ev = [zero] * n + lam[n:]
    chosen = [Cv, ev]
    for v in kspace:
        if linalg.rank(chosen + [v]) == len(chosen) + 1:
            chosen.append(v)
    if len(chosen) != 2 * m + 2:
        raise NotRegularPoint("could not complete {C, e} to a basis of the K-space")
    basis = chosen  # C, e, w_1..w_2m
    W = chosen[2:]
    omega = [[symplectic_pairing(a, b, n) for b in W] for a in W]
    # coordinates of each lifted column in the basis (C, e, w)
    B = [list(r) for r in zip(*basis)]  # N x (2m+2)
    proj_cols = []
    for col in zip(*frame_full):
        x = linalg.solve([[Jet.const(b, K) for b in row] for row in B], list(col))
        proj_cols.append(x[2:])
    # m columns independent at t = 0
    picked, vals = [], []
    for c in proj_cols:
        v0 = [x[0] for x in c]
        if linalg.rank(vals + [v0]) == len(vals) + 1:
            picked.append(c)
            vals.append(v0)
        if len(picked) == m:
            break
    if len(picked) != m:
        raise RankDropAlongCurve("the Jacobi curve does not have rank m at the base point")
    frame = tuple(tuple(row) for row in zip(*picked))
    return JacobiJet(m, frame, tuple(tuple(r) for r in omega), tuple(tuple(w) for w in W), tuple(full_dims))


@dataclass(frozen=True)
class ExtractedCurve:
    ode: CurveODE
    E: tuple  # generator of the line curve, coordinates in W
    sigma_top: object  # sigma(E^(m), E^(m-1)) at t = 0


def _span_basis_at_zero(cols: List[List[Jet]], expected: int) -> List[List[Jet]]:
    out, vals = [], []
    for c in cols:
        v0 = [x[0] for x in c]
        if linalg.rank(vals + [v0]) == len(vals) + 1:
            out.append(c)
            vals.append(v0)
    if len(out) != expected:
        raise DegenerateOsculation(f"osculating space has dimension {len(out)}, expected {expected}")
    return out


def extract_curve_ode(jj: JacobiJet) -> ExtractedCurve:
    """The line J^{(1-m)}(t) = (J^{(m-1)}(t))^angle and its monic ODE."""
    m = jj.m
    cols = jj.columns()
    allc, cur = list(cols), cols
    for _ in range(m - 1):
        cur = [[x.derivative() for x in c] for c in cur]
        allc += cur
    order = min(x.order for c in allc for x in c)
    allc = [[x.truncate(order) for x in c] for c in allc]
    osc = _span_basis_at_zero(allc, 2 * m - 1)
    Om = [list(r) for r in jj.omega]
    rows = [linalg.matvec(linalg.transpose(Om), c) for c in osc]  # (c^T Omega) as rows
    ker = linalg.kernel(rows)
    if len(ker) != 1:
        raise DegenerateOsculation("skew complement of the (m-1)-st osculating space is not a line")
    E = ker[0]
    # normalize: first coordinate with nonzero constant term equals 1 there
    for x in E:
        if not is_zero(x[0]):
            E = [y / x[0] for y in E]
            break
    ode = curve_ode(E, m)
    dm, dm1 = E, E
    for _ in range(m - 1):
        dm1 = [x.derivative() for x in dm1]
    dm = [x.derivative() for x in dm1]
    top = linalg.bilinear([x[0] for x in dm], Om, [x[0] for x in dm1])
    return ExtractedCurve(ode, tuple(E), top)


@dataclass
class RoundTrip:
    n: int
    r: tuple
    mode: str
    backend: str
    order: int
    curvatures: Optional[CurvatureTuple] = None
    epsilon: Optional[int] = None
    i0: Optional[int] = None
    orientation: Optional[int] = None
    flipped: bool = False
    regular_dims: list = field(default_factory=list)
    jacobi_dims: list = field(default_factory=list)
    isotropic: bool = False
    flow_residual_zero: bool = False
    point: list = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    jacobi: Optional[JacobiJet] = None

    def constants(self) -> list:
        return self.curvatures.constants() if self.curvatures else []

    def to_json(self) -> dict:
        rho = self.curvatures.rho if self.curvatures else ()
        return {
            "n": self.n,
            "r": [to_json(x) for x in self.r],
            "mode": self.mode,
            "backend": self.backend,
            "jet_order": self.order,
            "point": [to_json(x) for x in self.point],
            "curvatures": [to_json(x[0]) for x in rho],
            "curvatures_constant": all(_is_constant(x, 2 * i + 1) for i, x in enumerate(rho)) if rho else None,
            "curvature_jet_order": min((x.order for x in rho), default=None),
            "epsilon": self.epsilon,
            "i0": self.i0,
            "orientation": self.orientation,
            "orientation_flipped": self.flipped,
            "lift_osculation_dims": self.regular_dims,
            "jacobi_osculation_dims": self.jacobi_dims,
            "isotropic": self.isotropic,
            "flow_residual_zero": self.flow_residual_zero,
            "timings": {k: round(v, 4) for k, v in self.timings.items()},
        }


def _is_constant(x: Jet, derivs: int = 1) -> bool:
    # rho_i is built from up to 2(i-1) derivatives of the ODE coefficients
    return x.order == 0 or x.derivative().is_negligible(x, derivs=derivs)


def _velocity_reparam(cs: CotangentSystem, flow: FlowJet) -> Jet:
    """t = v(tau) where dtau/dt = -u5(gamma(t)), i.e. h = C / (-u5)."""
    u5 = cs.u[4] if flow.backend == "exact" else cs.u[4].map_coeffs(float)
    val = u5.evaluate(list(flow.trajectory))
    if not isinstance(val, Jet):
        val = Jet.const(val, flow.order)
    tau = (-val).integrate()
    if is_zero(tau[1]):
        raise InputError("u5 vanishes at the base point: velocity parametrization undefined")
    return tau.revert()


def _run(cs, point, n, r, mode, backend, K) -> RoundTrip:
    rt = RoundTrip(n, tuple(r), mode, backend, K, point=list(point))
    t0 = time.perf_counter()
    flow = flow_jet(cs, point, K, backend)
    from .flow import flow_residual

    rt.flow_residual_zero = all(x.is_negligible(*flow.trajectory) for x in flow_residual(cs, flow))
    rt.timings["flow"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    jj = jacobi_curve(cs, point, K, backend, flow=flow)
    rt.jacobi = jj
    rt.regular_dims = list(jj.full_dims)
    rt.jacobi_dims = jj.osculation_dims()
    rt.isotropic = jj.is_isotropic()
    rt.timings["jacobi_curve"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    ex = extract_curve_ode(jj)
    raw_sign = sign(ex.sigma_top)
    rt.timings["extract"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    if mode == "velocity":
        v = _velocity_reparam(cs, flow)
        c = semi_canonicalize(reparametrize(ex.ode, v))
        rt.orientation = raw_sign * sign(v[1])
        try:
            forms = wilczynski_forms(c)
            i0, A = first_nonvanishing_even(forms)
            if i0 is not None:
                rt.i0, rt.epsilon = i0, sign(A[0])
        except TruncationExceeded:
            pass
    elif mode == "wilczynski":
        c, v, i0, eps = canonical_parametrization(ex.ode)
        rt.i0, rt.epsilon = i0, eps
        rt.orientation = raw_sign * sign(v[1])
    else:
        raise InputError(f"unknown mode {mode!r}")
    # sigma(E^(m), E^(m-1)) = +1 fixes the direction of the parameter
    if rt.orientation < 0:
        c = orientation_flip(c)
        rt.flipped = True
        rt.orientation = 1
    rho = symplectic_curvatures(c)
    rt.curvatures = CurvatureTuple(rho.m, rho.rho, rt.epsilon, rt.i0)
    rt.timings["normalize"] = time.perf_counter() - t0
    return rt


def default_order(m: int) -> int:
    return 2 * m + 6


def curvature_roundtrip(
    n: int,
    r: Sequence,
    mode: str = "velocity",
    backend: str = "exact",
    K: Optional[int] = None,
    point: Optional[Sequence] = None,
) -> RoundTrip:
    """build_model -> lift -> Jacobi curve -> ODE -> normalization -> curvatures.

    Retries once at twice the jet order when some stage runs out of order.
    """
    if mode not in ("velocity", "wilczynski"):
        raise InputError(f"unknown mode {mode!r}")
    ms = build_model(n, r)
    if mode == "wilczynski" and is_exceptional(ms.r):
        raise ExceptionalTuple("Wilczynski mode needs a non-exceptional tuple")
    cs = cotangent_lift(ms, q=[0] * n)
    point = default_point(cs) if point is None else list(point)
    K = K if K is not None else default_order(n - 3)
    try:
        return _run(cs, point, n, ms.r, mode, backend, K)
    except TruncationExceeded:
        return _run(cs, point, n, ms.r, mode, backend, 2 * K)
