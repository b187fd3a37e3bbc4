import sys

import gmpy2
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rank2dist.exactalg import Jet, MPoly, PolyVF

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def rationals(max_num=9, max_den=4, nonzero=False):
    num = st.integers(-max_num, max_num)
    if nonzero:
        num = num.filter(lambda x: x != 0)
    return st.builds(lambda p, q: gmpy2.mpq(p, q), num, st.integers(1, max_den))


def jets(order, **kw):
    return st.lists(rationals(**kw), min_size=order + 1, max_size=order + 1).map(Jet)


def unit_jets(order):
    """Jets with nonzero constant term."""
    return st.tuples(rationals(nonzero=True), st.lists(rationals(), min_size=order, max_size=order)).map(
        lambda t: Jet([t[0]] + t[1])
    )


def diffeo_jets(order):
    """v(0) = 0, v'(0) != 0: local reparametrizations."""
    return st.tuples(rationals(nonzero=True), st.lists(rationals(), min_size=order - 1, max_size=order - 1)).map(
        lambda t: Jet([gmpy2.mpq(0), t[0]] + t[1])
    )


@st.composite
def polys(draw, nvars, max_deg=3, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.lists(st.integers(0, max_deg), min_size=nvars, max_size=nvars)))
        if sum(exp) <= max_deg:
            terms[exp] = draw(rationals(nonzero=True))
    return MPoly(nvars, terms)


@st.composite
def fields(draw, nvars, max_deg=3):
    return PolyVF([draw(polys(nvars, max_deg, max_terms=3)) for _ in range(nvars)])


@pytest.fixture
def q():
    return gmpy2.mpq


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
