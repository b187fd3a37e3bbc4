"""The nine acceptance criteria, one test each.

Every test prints a single PASS/FAIL line; the lines are repeated in the
terminal summary.  Run directly with ``python tests/test_acceptance.py``.
"""
import random
import sys
import time
from pathlib import Path

import gmpy2
import pytest

sys.path.insert(0, str(Path(__file__).parent))
from tuples import exceptional_tuple, generic_tuple, normalizable_tuple  # noqa: E402

from rank2dist.classify import alphas, compatible_normalization, equivalent_tuples, is_exceptional  # noqa: E402
from rank2dist.exactalg import Jet  # noqa: E402
from rank2dist.jacobi import curvature_roundtrip, jacobi_curve, verify_frame_relations  # noqa: E402
from rank2dist.models import build_model, cotangent_lift, default_point, growth_vector, regular_point_test  # noqa: E402
from rank2dist.projcurve import (  # noqa: E402
    CurveODE,
    ode_from_curvatures,
    projective_normalize,
    reparametrize,
    semi_canonicalize,
    symplectic_curvatures,
    wilczynski,
)

q = gmpy2.mpq
RESULTS = {}
JACOBI_JETS = []


class Criterion:
    def __init__(self, number, title, limit):
        self.number, self.title, self.limit = number, title, limit
        self.failures = []

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        if exc is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        if self.limit is not None and dt > self.limit:
            self.failures.append(f"runtime {dt:.1f}s over {self.limit}s")
        status = "FAIL" if self.failures else "PASS"
        detail = "; ".join(self.failures[:3]) if self.failures else f"{dt:.2f}s"
        line = f"{status} criterion {self.number}: {self.title} ({detail})"
        RESULTS[self.number] = line
        print(line, flush=True)
        if exc is None and self.failures:
            pytest.fail(line)
        return False


def agree(a, b):
    k = min(a.order, b.order)
    return a.truncate(k) == b.truncate(k)


# 1 ---------------------------------------------------------------------------

def expand(m):
    poly = [1]
    for i in range(1, m + 1):
        poly = [a - (2 * i - 1) ** 2 * b for a, b in zip(poly + [0], [0] + poly)]
    return [(-1) ** i * poly[i] for i in range(1, m + 1)]


def test_criterion_1_alphas():
    with Criterion(1, "alpha coefficients", 1.0) as c:
        c.check(alphas(2) == [10, 9] and alphas(3) == [35, 259, 225], "small cases")
        for m in range(1, 7):
            c.check(alphas(m) == expand(m), f"alphas({m})")
            c.check(bool(is_exceptional(alphas(m))), f"alphas({m}) not exceptional")


# 2 ---------------------------------------------------------------------------

def projective_invariants(t, K):
    """W_1..W_{2m-2} of the self-adjoint constant ODE, known to order >= K."""
    m = len(t)
    order = K + 3 * m - 2
    while True:
        proj, _ = projective_normalize(ode_from_curvatures(t, order=order))
        W = wilczynski(proj)
        if all(w.order >= K for w in W.W):
            return W
        order += 2


def test_criterion_2_exceptional_iff_flat():
    rng = random.Random(2)
    with Criterion(2, "exceptional iff flat", 30.0) as c:
        for k in range(20):
            m = 1 + k % 4
            t = exceptional_tuple(rng, m)
            W = projective_invariants(t, 2 * m + 6)
            c.check(W.all_zero(), f"exceptional {t} has a nonzero invariant")
        for k in range(20):
            m = 2 + k % 3
            t = generic_tuple(rng, m)
            W = projective_invariants(t, 2 * m + 6)
            c.check(any(not w.is_zero() for w in W.even().values()), f"{t} has no even invariant")


# 3 ---------------------------------------------------------------------------

def random_jet(rng, order):
    return Jet(q(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(order + 1))


def test_criterion_3_wilczynski_covariance():
    rng = random.Random(3)
    K = 10
    with Criterion(3, "Wilczynski covariance", 30.0) as c:
        for k in range(10):
            m = 2 + k % 2
            zero = Jet([q(0)] * (K + 1))
            B = [random_jet(rng, K) for _ in range(2 * m - 2)] + [zero, zero]
            ode = CurveODE(m, B, "projective")
            a = q(rng.choice([-1, 1]) * rng.randint(1, 4), rng.randint(1, 3))
            b = q(rng.randint(-4, 4), rng.randint(1, 3))
            t = Jet.variable(K + 4)
            v = a * t / (1 + b * t)
            new = semi_canonicalize(reparametrize(ode, v))
            c.check(new.B[-2].is_zero(), "Moebius map left the projective class")
            W_old, W_new = wilczynski(ode), wilczynski(new.with_tag("projective"))
            dv = v.derivative()
            for i in W_old.indices():
                c.check(agree(W_new[i], W_old[i].compose(v) * dv ** (i + 2)), f"case {k}: W_{i}")


# 4 ---------------------------------------------------------------------------

def test_criterion_4_self_adjoint_roundtrip():
    rng = random.Random(4)
    with Criterion(4, "self-adjoint round trip", 30.0) as c:
        for k in range(20):
            m = 1 + k % 4
            rho = [q(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(m)]
            out = symplectic_curvatures(ode_from_curvatures(rho, order=2 * m + 6))
            c.check(out.constants() == rho and out.is_constant(), f"constant {rho}")
        for k in range(10):
            m = 1 + k % 4
            rho = [random_jet(rng, 4 * m + 4) for _ in range(m)]
            out = symplectic_curvatures(ode_from_curvatures(rho)).rho
            c.check(all(agree(a, b) for a, b in zip(rho, out)), f"jet-valued case {k}")


# 5 ---------------------------------------------------------------------------

def test_criterion_5_scaling_law():
    rng = random.Random(5)
    cases = [normalizable_tuple(rng, 2 + k % 3) for k in range(20)]
    with Criterion(5, "scaling law", 10.0) as c:
        c.check(equivalent_tuples([1, 1], [4, 16]).c == 2, "equivalent_tuples((1,1),(4,16))")
        n = compatible_normalization([0, -16])
        c.check((n.c, n.normalized.r, n.i0, n.epsilon) == (q(1, 2), (0, -1), 1, 1), "normalization of (0,-16)")
        for t in cases:
            n = compatible_normalization(t)
            again = compatible_normalization(n.normalized)
            c.check(again.c == 1 and again.normalized == n.normalized, f"idempotence on {t}")


# 6 ---------------------------------------------------------------------------

def test_criterion_6_model_statics():
    rng = random.Random(6)
    with Criterion(6, "model statics", 60.0) as c:
        for n in range(5, 9):
            for _ in range(5):
                r = [q(rng.randint(-9, 9), rng.randint(1, 3)) for _ in range(n - 3)]
                ms = build_model(n, r)
                gv = growth_vector(ms.X1, ms.X2, [0] * n)
                c.check(gv == [2, 3] + list(range(5, n + 1)), f"growth {gv} for n={n}")
                cs = cotangent_lift(ms)
                c.check(regular_point_test(cs, default_point(cs)).regular, f"regularity for n={n}, r={r}")


# 7 ---------------------------------------------------------------------------

ROUNDTRIPS = [(5, [0, 0], "velocity"), (5, [0, -1], "wilczynski"), (6, [1, 0, 0], "velocity")]


def test_criterion_7_jacobi_roundtrip():
    with Criterion(7, "Jacobi round trip", 300.0) as c:
        for n, r, mode in ROUNDTRIPS:
            rt = curvature_roundtrip(n, r, mode)
            JACOBI_JETS.append(rt.jacobi)
            c.check(rt.constants() == [q(x) for x in r], f"exact {n} {r} {mode}: {rt.constants()}")
            c.check(rt.curvatures.is_constant(), f"non-constant curvature jets for {r}")
            if mode == "wilczynski":
                c.check((rt.epsilon, rt.i0) == (1, 1), f"eps, i0 = {rt.epsilon}, {rt.i0}")
            fl = curvature_roundtrip(n, r, mode, backend="float")
            c.check(all(abs(a - x) <= 1e-9 for a, x in zip(fl.constants(), r)), f"float {n} {r}: {fl.constants()}")


# 8 ---------------------------------------------------------------------------

def test_criterion_8_structure_equations():
    with Criterion(8, "structure equations", 300.0) as c:
        for r in ([0, 0], [0, -1]):
            rep = verify_frame_relations(5, r)
            c.check(all(x == 0 for x in rep.eh), f"[e,h] for {r}")
            c.check(all(all(x == 0 for x in rep.e_eps[i]) for i in range(1, 5)), f"[e,eps_i] for {r}")
            c.check(all(x == 0 for x in rep.he2m_residual), f"[h,eps_4] for {r}")
            c.check(rep.gram_pattern_ok and all(all(x == 0 for x in v) for v in rep.gram_residual.values()), f"Gram pattern for {r}")
            c.check(rep.all_zero, f"report for {r}")
            cs = cotangent_lift(build_model(5, r))
            JACOBI_JETS.append(jacobi_curve(cs, default_point(cs), 10))


# 9 ---------------------------------------------------------------------------

def test_criterion_9_lagrangian_ladder():
    with Criterion(9, "isotropy and osculation ladder", None) as c:
        c.check(len(JACOBI_JETS) == 5, f"expected 5 Jacobi jets from criteria 7-8, got {len(JACOBI_JETS)}")
        for jj in JACOBI_JETS:
            c.check(jj.is_isotropic(), "isotropy")
            c.check(all(x.is_zero() for x in jj.isotropy_residuals()), "exact isotropy")
            c.check(jj.osculation_dims() == list(range(jj.m, 2 * jj.m + 1)), f"ladder {jj.osculation_dims()}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
