import itertools

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from laxord.finord import FinPreorder, MonotoneMap, monotone_maps
from laxord.fixtures import B2, C2, C3
from laxord.laxcomma import LaxMorphism, LaxObject

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_BASES = (C2, C3, B2)


@st.composite
def preorders(draw, max_size=3, prefix="e"):
    n = draw(st.integers(0, max_size))
    names = [f"{prefix}{i}" for i in range(n)]
    off = [(u, v) for u, v in itertools.product(names, repeat=2) if u != v]
    pairs = draw(st.lists(st.sampled_from(off), max_size=4)) if off else []
    return FinPreorder.closure(names, pairs)


@st.composite
def monotone(draw, dom, cod, allowed=None):
    maps = list(itertools.islice(monotone_maps(dom, cod, allowed), 200))
    if not maps:
        return None
    return draw(st.sampled_from(maps))


@st.composite
def lax_objects(draw, base=None, max_size=3, prefix="y"):
    X = base or draw(st.sampled_from(SMALL_BASES))
    Y = draw(preorders(max_size, prefix))
    a = draw(monotone(Y, X.underlying))
    return LaxObject(X, Y, a)


@st.composite
def lax_morphisms(draw, base=None, max_size=3):
    X = base or draw(st.sampled_from(SMALL_BASES))
    B = draw(lax_objects(X, max_size, "z"))
    A = draw(lax_objects(X, max_size, "y"))
    allowed = lambda y: [z for z in B.total.elems if X.le(A(y), B(z))]
    m = draw(monotone(A.total, B.total, allowed))
    if m is None:
        m = draw(monotone(A.total, B.total))
        if m is None:
            # only possible for an empty target and non-empty source; use the empty source
            A = LaxObject(X, FinPreorder([], []), MonotoneMap(FinPreorder([], []), X.underlying, {}))
            m = MonotoneMap(A.total, B.total, {})
        else:
            A = LaxObject(X, A.total, MonotoneMap(A.total, X.underlying, {y: X.bottom for y in A.total.elems}))
    return LaxMorphism(A, B, m)


# --------------------------------------------------------------------------
# Acceptance reporting: one line per criterion in the terminal summary, and the
# acceptance module runs last so the whole-suite timing criterion sees everything.

import time

import pytest

SESSION_START = time.monotonic()
_ACCEPTANCE: dict = {}


def pytest_collection_modifyitems(session, config, items):
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py"))


@pytest.fixture
def criterion(request):
    def record(number, title, passed, detail):
        _ACCEPTANCE[number] = (title, passed, detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {n:>2}. {title}: {detail}")
