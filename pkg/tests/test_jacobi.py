import dataclasses
import random

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rationals
from rank2dist.errors import ExceptionalTuple, InputError
from rank2dist.exactalg import Jet, PolyVF, linalg
from rank2dist.jacobi import (
    JacobiJet,
    curvature_roundtrip,
    extract_curve_ode,
    flow_jet,
    flow_residual,
    jacobi_curve,
    verify_frame_relations,
)
from rank2dist.models import build_model, cotangent_lift, default_point
from rank2dist.projcurve import (
    curve_ode,
    projective_normalize,
    reparametrize,
    rescale_curve,
    semi_canonicalize,
    symplectic_curvatures,
    wilczynski,
    wilczynski_forms,
)

q = gmpy2.mpq


def agree(a, b):
    k = min(a.order, b.order)
    return a.truncate(k) == b.truncate(k)


def system(n, r):
    cs = cotangent_lift(build_model(n, r))
    return cs, default_point(cs)


# -- flow ---------------------------------------------------------------------

def test_flow_residual_vanishes():
    cs, p = system(5, [1, -2])
    flow = flow_jet(cs, p, 8)
    assert all(x.is_zero() for x in flow_residual(cs, flow))
    assert all(x.order == 7 for x in flow_residual(cs, flow))


def test_constant_field():
    cs, p = system(5, [0, 0])
    cs = dataclasses.replace(cs, C=PolyVF.coordinate(0, 10))
    flow = flow_jet(cs, p, 5)
    assert flow.trajectory[0] == Jet.variable(5)
    assert all(x.is_constant() for x in flow.trajectory[1:])
    for i, row in enumerate(flow.variational()):
        for j, x in enumerate(row):
            assert x == Jet.const(q(int(i == j)), 5)


def test_reversed_flow():
    # the flow of -C is the flow of C run backwards
    cs, p = system(5, [2, 3])
    back = dataclasses.replace(cs, C=PolyVF([-c for c in cs.C.comps]))
    fwd, bwd = flow_jet(cs, p, 7), flow_jet(back, p, 7)
    minus_t = -Jet.variable(7)
    for a, b in zip(fwd.trajectory, bwd.trajectory):
        assert a.compose(minus_t) == b


def test_variational_starts_at_identity():
    cs, p = system(6, [1, 0, 0])
    flow = flow_jet(cs, p, 4)
    assert all(x[0] == (i == j) for i, row in enumerate(flow.psi) for j, x in enumerate(row))


# -- Jacobi curves ----------------------------------------------------------------

@pytest.mark.parametrize("n,r", [(5, [0, 0]), (5, [0, -1]), (6, [1, 0, 0]), (6, [1, -2, 3])])
def test_jacobi_curve_invariants(n, r):
    cs, p = system(n, r)
    m = n - 3
    jj = jacobi_curve(cs, p, 2 * m + 6)
    assert jj.is_isotropic()
    assert jj.osculation_dims() == list(range(m, 2 * m + 1))
    assert list(jj.full_dims) == list(range(n - 1, 2 * n - 3))
    assert linalg.rank([list(r) for r in jj.omega]) == 2 * m


def _transform(jj, T):
    """Coordinates x -> T x on W; the form becomes T^-T omega T^-1."""
    k = len(T)
    unit = lambda j: [q(int(i == j)) for i in range(k)]
    Tinv = linalg.transpose([linalg.solve(T, unit(j)) for j in range(k)])
    frame = [[sum((jj.frame[l][j] * T[i][l] for l in range(k)), Jet.const(q(0), jj.order)) for j in range(jj.m)] for i in range(k)]
    omega = linalg.matmul(linalg.transpose(Tinv), linalg.matmul([list(r) for r in jj.omega], Tinv))
    return JacobiJet(jj.m, tuple(map(tuple, frame)), tuple(map(tuple, omega)), jj.w_basis, jj.full_dims)


def _canonical_B(jj):
    return semi_canonicalize(extract_curve_ode(jj).ode).B


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_change_of_basis_in_W(seed):
    rng = random.Random(seed)
    while True:
        T = [[q(rng.randint(-3, 3)) for _ in range(4)] for _ in range(4)]
        if linalg.rank(T) == 4:
            break
    cs, p = system(5, [0, -1])
    jj = jacobi_curve(cs, p, 10)
    moved = _transform(jj, T)
    assert moved.is_isotropic()
    for a, b in zip(_canonical_B(jj), _canonical_B(moved)):
        assert agree(a, b)


def test_moving_frame_inside_the_plane():
    # J(t) is a plane; any jet-valued change of its basis gives the same curve
    cs, p = system(5, [1, 2])
    jj = jacobi_curve(cs, p, 10)
    t = Jet.variable(10)
    G = [[1 + t, t * t], [3 * t, 2 - t]]
    cols = jj.columns()
    new = [[cols[0][i] * G[0][j] + cols[1][i] * G[1][j] for j in range(2)] for i in range(4)]
    jj2 = JacobiJet(2, tuple(map(tuple, new)), jj.omega, jj.w_basis, jj.full_dims)
    for a, b in zip(_canonical_B(jj), _canonical_B(jj2)):
        assert agree(a, b)


def test_generator_rescaling():
    cs, p = system(5, [0, -1])
    ex = extract_curve_ode(jacobi_curve(cs, p, 10))
    t = Jet.variable(10)
    g = 2 + t - 3 * t * t
    other = curve_ode(rescale_curve(list(ex.E), g.truncate(ex.E[0].order)), 2)
    A, B = wilczynski_forms(ex.ode), wilczynski_forms(other)
    for i in A.indices():
        assert agree(A[i], B[i])


# -- round trips -----------------------------------------------------------------

@pytest.mark.parametrize(
    "n,r,mode",
    [
        (5, [0, 0], "velocity"),
        (5, [0, -1], "wilczynski"),
        (6, [1, 0, 0], "velocity"),
        (5, [3, -7], "velocity"),
        (6, [1, -2, 3], "velocity"),
    ],
)
def test_roundtrip(n, r, mode):
    rt = curvature_roundtrip(n, r, mode)
    assert rt.constants() == [q(x) for x in r]
    assert all(x.is_constant() for x in rt.curvatures.rho)
    assert rt.isotropic and rt.flow_residual_zero
    assert rt.jacobi_dims == list(range(n - 3, 2 * (n - 3) + 1))
    assert rt.orientation == 1


@pytest.mark.parametrize("r", [[0, -16], [0, 81], [q(10, 3), -15]])
def test_wilczynski_mode_gives_the_compatible_tuple(r):
    # |A_2| is a fourth power here, so the canonical parameter is rational
    from rank2dist.classify import compatible_normalization

    rt = curvature_roundtrip(5, r, "wilczynski")
    n = compatible_normalization(r)
    assert tuple(rt.constants()) == n.normalized.r
    assert (rt.epsilon, rt.i0) == (n.epsilon, n.i0)


def test_wilczynski_mode_reports_sign():
    rt = curvature_roundtrip(5, [0, -1], "wilczynski")
    assert (rt.epsilon, rt.i0) == (1, 1)


def test_exceptional_in_wilczynski_mode():
    with pytest.raises(ExceptionalTuple):
        curvature_roundtrip(5, [10, 9], "wilczynski")
    with pytest.raises(InputError):
        curvature_roundtrip(5, [0, 0], "sideways")


def test_exceptional_model_is_flat():
    # the Jacobi curve of an exceptional model is a rational normal curve
    cs, p = system(5, [10, 9])
    ex = extract_curve_ode(jacobi_curve(cs, p, 12))
    proj, _ = projective_normalize(semi_canonicalize(ex.ode))
    assert wilczynski(proj).all_zero()


@pytest.mark.parametrize("n,r,mode", [(5, [0, 0], "velocity"), (5, [0, -1], "wilczynski"), (6, [1, 0, 0], "velocity")])
def test_float_backend_agrees(n, r, mode):
    rt = curvature_roundtrip(n, r, mode, backend="float")
    assert all(abs(a - float(b)) <= 1e-9 for a, b in zip(rt.constants(), r))


@settings(max_examples=6)
@given(st.lists(rationals(max_num=5, max_den=2), min_size=2, max_size=2), st.sampled_from([q(2), q(-3, 2), q(1, 3)]))
def test_homothety_invariance(r, lam):
    cs, p = system(5, r)
    scaled = p[:5] + [lam * x for x in p[5:]]
    base = curvature_roundtrip(5, r, "velocity")
    moved = curvature_roundtrip(5, r, "velocity", point=scaled)
    for a, b in zip(base.curvatures.rho, moved.curvatures.rho):
        assert agree(a, b)


@settings(max_examples=6)
@given(st.lists(rationals(max_num=5, max_den=2), min_size=2, max_size=2))
def test_velocity_roundtrip_n5(r):
    assert curvature_roundtrip(5, r, "velocity").constants() == [q(x) for x in r]


# -- structure equations ------------------------------------------------------------

@pytest.mark.parametrize("n,r", [(5, [0, 0]), (5, [0, -1]), (5, [3, -7]), (6, [1, -2, 3])])
def test_frame_relations(n, r):
    rep = verify_frame_relations(n, r)
    assert rep.all_zero
    assert rep.gram_pattern_ok
    assert rep.sign_flip_all_zero


@pytest.mark.parametrize("r", [[0, -1], [3, -7]])
def test_frame_bracket_of_top_vector(r):
    # [h, eps_4] = r1 eps_3 - r2 eps_1 at m = 2
    c = verify_frame_relations(5, r).he2m_coeffs
    assert (c["eps1"], c["eps3"]) == (-r[1], r[0])
    assert all(c[k] == 0 for k in ("e", "h", "eps2", "eps4", "eta"))


def test_frame_gram_pattern():
    g = verify_frame_relations(5, [0, -1]).gram
    assert (g["1,4"], g["2,3"]) == (1, -1)
    assert all(g[k] == 0 for k in ("1,2", "1,3", "2,4", "3,4"))
