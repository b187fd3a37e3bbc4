import random

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rationals
from tuples import exceptional_tuple, generic_tuple, normalizable_tuple
from rank2dist.classify import (
    RTuple,
    alphas,
    char_poly,
    compatible_normalization,
    equivalent_tuples,
    is_exceptional,
    moduli_report,
)
from rank2dist.errors import ExceptionalTuple, InputError

q = gmpy2.mpq


def expand(m):
    poly = [1]
    for i in range(1, m + 1):
        root = (2 * i - 1) ** 2
        poly = [a - root * b for a, b in zip(poly + [0], [0] + poly)]
    return [(-1) ** i * poly[i] for i in range(1, m + 1)]


def test_char_poly():
    assert char_poly([0, 0]) == [1, 0, 0, 0, 0]
    assert char_poly([10, 9]) == [1, 0, -10, 0, 9]
    assert char_poly([35, 259, 225]) == [1, 0, -35, 0, 259, 0, -225]


@pytest.mark.parametrize("m", range(1, 9))
def test_alphas(m):
    assert alphas(m) == expand(m)
    assert is_exceptional(alphas(m))


def test_small_alphas():
    assert alphas(1) == [1]
    assert alphas(2) == [10, 9]
    assert alphas(3) == [35, 259, 225]
    with pytest.raises(InputError):
        alphas(0)


def test_every_m1_tuple_is_exceptional():
    assert is_exceptional([q(-7, 3)])


def test_exceptional_examples():
    r = is_exceptional([0, 0])
    assert r and r.step_squared == 0
    r = is_exceptional([10, 9])
    assert r and r.step_squared == 1
    assert not is_exceptional([1, 0])
    assert is_exceptional([1, q(9, 100)])


@given(st.integers(2, 5), rationals(nonzero=True))
def test_exceptionality_is_scale_invariant(m, s):
    s2 = s * s
    assert is_exceptional(RTuple(tuple(alphas(m))).scaled(s2))
    t = RTuple(tuple(q(a) for a in alphas(m)))
    bumped = RTuple(t.r[:-1] + (t.r[-1] + 1,))
    assert not is_exceptional(bumped.scaled(s2))


def test_equivalence_examples():
    assert equivalent_tuples([1, 1], [4, 16]).c == 2
    assert equivalent_tuples([1, 1], [4, 17]) is None
    assert equivalent_tuples([3, -2], [3, -2]).c == 1
    assert equivalent_tuples([0, 1], [0, 16]).c == 2
    assert equivalent_tuples([1, 0], [-1, 0]) is None
    with pytest.raises(InputError):
        equivalent_tuples([1], [1, 2])


tuples3 = st.lists(rationals(nonzero=True), min_size=3, max_size=3)
scales = st.integers(1, 4).map(q)


@given(tuples3, scales, scales)
def test_equivalence_is_an_equivalence_relation(t, a, b):
    u = RTuple(tuple(t)).scaled(a * a)
    w = u.scaled(b * b)
    assert equivalent_tuples(t, t).c == 1
    assert equivalent_tuples(t, u).c == a
    assert equivalent_tuples(u, t).c == 1 / a
    assert equivalent_tuples(t, w).c == equivalent_tuples(t, u).c * equivalent_tuples(u, w).c


def test_normalization_example():
    n = compatible_normalization([0, -16])
    assert (n.c, n.normalized.r, n.i0, n.epsilon) == (q(1, 2), (0, -1), 1, 1)
    assert compatible_normalization([0, -1]).c == 1
    with pytest.raises(ExceptionalTuple):
        compatible_normalization([10, 9])


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.integers(2, 4))
def test_normalization_is_idempotent(seed, m):
    t = normalizable_tuple(random.Random(seed), m)
    n = compatible_normalization(t)
    again = compatible_normalization(n.normalized)
    assert again.c == 1
    assert again.normalized == n.normalized
    assert abs(again.invariants[2 * n.i0 - 1]) == 1


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.integers(2, 4))
def test_normalization_float_idempotent(seed, m):
    t = generic_tuple(random.Random(seed), m)
    n = compatible_normalization(t, "float")
    again = compatible_normalization(n.normalized, "float")
    assert abs(again.c - 1) < 1e-9


@given(rationals(nonzero=True))
def test_m2_without_r1_normalizes_to_minus_epsilon(k):
    # with r1 = 0 the normal form is (0, -eps)
    for r2 in (k * k, -k * k):
        n = compatible_normalization([0, r2])
        assert n.i0 == 1
        assert n.normalized.r == (0, -n.epsilon)


@given(rationals(nonzero=True))
def test_m2_without_r1_float(r2):
    n = compatible_normalization([0, r2], "float")
    assert n.normalized.r[1] == pytest.approx(-n.epsilon)


def test_normalization_keeps_equivalence_class():
    t = [q(1, 2), 3, q(-1, 4)]
    n = compatible_normalization(t, "float")
    assert all(abs(x - float(y) * n.c_squared ** (i + 1)) < 1e-12 for i, (x, y) in enumerate(zip(n.normalized.r, t)))


def test_reports():
    flat = moduli_report([0, 0])
    assert flat.is_exceptional and flat.on_exceptional_leaf
    assert flat.equivalence_normal_form is None
    r = moduli_report([0, -16])
    assert not r.is_exceptional
    assert r.equivalence_normal_form.r == (0, -1)
    assert moduli_report([10, 9]).to_json()["is_exceptional"] is True
    irr = moduli_report([0, 2])
    assert irr.backend == "float"
    assert irr.equivalence_normal_form.r[1] == pytest.approx(1)


@given(st.integers(0, 10**6), st.integers(1, 4))
def test_exceptional_generator(seed, m):
    assert is_exceptional(exceptional_tuple(random.Random(seed), m))
