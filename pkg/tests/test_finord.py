import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from laxord import finord
from laxord.errors import InvalidStructure, NotComplete, NotExponentiable, NotMonotone
from laxord.finord import mk_map, mk_poset, mk_preorder
from laxord.fixtures import B2, B3, C2, C3, EMPTY, M3, N5, ONE, fzz, two_chains, zigzag

from conftest import monotone, preorders


def test_closure_of_single_edge():
    P = mk_preorder(["0", "1"], [("0", "1")])
    assert P.leq == {("0", "0"), ("1", "1"), ("0", "1")}


def test_transitivity_forced():
    assert C3.underlying.le("z0", "z2")


def test_isomorphic_elements_kept_apart():
    P = mk_preorder(["a", "b"], [("a", "b"), ("b", "a")])
    assert len(P) == 2 and P.le("a", "b") and P.le("b", "a")
    assert not P.is_antisymmetric()


def test_preorder_rejects_bad_input():
    with pytest.raises(InvalidStructure):
        mk_preorder(["a", "a"])
    with pytest.raises(InvalidStructure):
        mk_preorder(["a"], [("a", "b")])


@given(preorders(4))
def test_closure_is_reflexive_and_transitive(P):
    assert all(P.le(e, e) for e in P.elems)
    for (x, y), (y2, z) in itertools.product(P.leq, repeat=2):
        if y == y2:
            assert P.le(x, z)


def test_maps():
    finord.identity(C3.underlying)
    with pytest.raises(NotMonotone) as err:
        mk_map(C2.underlying, C2.underlying, {"0": "1", "1": "0"})
    assert err.value.witness == ("0", "1")
    f = fzz()
    assert f.is_surjective()


def test_fzz_on_literal_two_chains_is_monotone():
    f = fzz(two_chains())
    assert f("b2") == "z2"


@given(preorders(3), preorders(3, "f"), st.data())
def test_compose_of_monotone_is_monotone(P, Q, data):
    f = data.draw(monotone(P, Q))
    if f is None:
        return
    g = finord.identity(Q)
    assert finord.compose(g, f) == f
    assert finord.is_monotone(P, Q, f.table)


def test_monotone_maps_counts():
    assert len(list(finord.monotone_maps(C2.underlying, C2.underlying))) == 3
    assert len(list(finord.monotone_maps(C2.underlying, C3.underlying))) == 6
    assert len(list(finord.monotone_maps(EMPTY, C3.underlying))) == 1
    assert list(finord.monotone_maps(ONE, EMPTY)) == []


def test_product_of_chains_is_b2():
    P, projs = finord.product_ord([C2.underlying, C2.underlying])
    assert len(P) == 4
    assert finord.find_isomorphism(P, B2.underlying) is not None


def test_coequalizer_collapses():
    zero = mk_map(ONE, C2.underlying, {"*": "0"})
    one = mk_map(ONE, C2.underlying, {"*": "1"})
    Q, (q,) = finord.coequalizer_ord(zero, one)
    assert len(Q) == 1


def test_equalizer_of_identities():
    i = finord.identity(C3.underlying)
    E, (m,) = finord.equalizer_ord(i, i)
    assert finord.find_isomorphism(E, C3.underlying) is not None


def test_pullback_and_coproduct_shapes():
    f = fzz()
    P, (p1, p2) = finord.pullback_ord(f, f)
    assert len(P) == sum(1 for y in f.dom.elems for y2 in f.dom.elems if f(y) == f(y2))
    S, injs = finord.coproduct_ord([C2.underlying, C3.underlying])
    assert len(S) == 5 and not S.le((0, "1"), (1, "z0"))


def test_lim_colim_dispatch():
    i = finord.identity(C2.underlying)
    assert len(finord.lim_colim_ord("coequalizer", (i, i)).obj) == 2
    with pytest.raises(ValueError):
        finord.lim_colim_ord("bogus", ())


def test_exponential_ord():
    E = finord.exponential_ord(C2.underlying, C2.underlying)
    assert len(E) == 3
    const0, ident, const1 = (("0", "0"), ("1", "0")), (("0", "0"), ("1", "1")), (("0", "1"), ("1", "1"))
    assert {tuple(sorted(g)) for g in E.elems} == {const0, ident, const1}
    assert E.le(const0, ident) and E.le(ident, const1)
    assert len(finord.exponential_ord(EMPTY, C3.underlying)) == 1
    assert len(finord.exponential_ord(C2.underlying, C3.underlying)) == 6


def test_bounds():
    assert B2.meet("p", "q") == "bot"
    assert B2.join("p", "q") == "top"
    assert finord.bound(C3, [], "meet") == "z2"
    assert finord.bound(C2, ["0", "1"], "join") == "1"
    assert C3.join_all([]) == "z0"


def test_base_poset_validation():
    with pytest.raises(NotComplete):
        mk_poset(["a", "b"])
    with pytest.raises(InvalidStructure):
        mk_poset(["a", "b"], [("a", "b"), ("b", "a")])


def test_heyting():
    assert finord.heyting_impl(C2, "1", "0") == "0"
    assert finord.heyting_impl(C2, "0", "0") == "1"
    with pytest.raises(NotExponentiable) as err:
        finord.heyting_impl(M3, "a", "b")
    assert err.value.witness is not None


@pytest.mark.parametrize("X,expected", [(C2, True), (C3, True), (B2, True), (B3, True), (M3, False), (N5, False)])
def test_is_frame(X, expected):
    assert finord.is_frame(X) is expected


def test_exponentiable_elements():
    for X in (C2, C3, B2, M3, N5):
        assert finord.is_exponentiable_element(X, X.bottom)
        assert finord.is_exponentiable_element(X, X.top)
    assert all(finord.is_exponentiable_element(B2, x) for x in B2.elems)
    assert not finord.is_exponentiable_element(M3, "a")


@pytest.mark.parametrize("X", [C2, C3, B2, B3])
def test_heyting_residuation(X):
    for x, y, z in itertools.product(X.elems, repeat=3):
        assert X.le(z, finord.heyting_impl(X, x, y)) == X.le(X.meet(z, x), y)


def test_regular_epi_ord():
    assert finord.is_regular_epi_ord(finord.identity(C3.underlying))
    assert finord.is_regular_epi_ord(fzz())
    disc = mk_preorder(["0", "1"])
    inc = mk_map(disc, C2.underlying, {"0": "0", "1": "1"})
    assert not finord.is_regular_epi_ord(inc)
    assert finord.regular_epi_ord_failure(inc) == ("ungenerated", ("0", "1"))


def test_stable_regular_epi_ord():
    assert finord.is_stable_regular_epi_ord(finord.identity(C3.underlying))
    assert finord.is_stable_regular_epi_ord(fzz())
    assert not finord.is_stable_regular_epi_ord(fzz(two_chains()))
    assert finord.lift_chains(fzz(two_chains()), 2).failure == ("z0", "z2")


def test_effective_descent_ord():
    assert finord.is_effective_descent_ord(finord.identity(C3.underlying))
    check = finord.ed_check(fzz())
    assert not check and check.failure == ("z0", "z1", "z2")
    disc = mk_preorder(["u", "v"])
    collapse = mk_map(mk_preorder(["a", "b", "c"]), disc, {"a": "u", "b": "v", "c": "v"})
    assert finord.is_effective_descent_ord(collapse)


def test_zigzag_lifts_every_pair():
    f = fzz(zigzag())
    for z0, z1 in C3.underlying.leq:
        assert any(f(y0) == z0 and f(y1) == z1 for y0, y1 in f.dom.leq)


@given(preorders(3), preorders(3, "f"), st.data())
def test_epi_class_inclusions(P, Q, data):
    f = data.draw(monotone(P, Q))
    if f is None:
        return
    if finord.is_effective_descent_ord(f):
        assert finord.is_stable_regular_epi_ord(f)
    if finord.is_stable_regular_epi_ord(f):
        assert finord.is_regular_epi_ord(f)


def test_least_extension_example():
    Y = mk_preorder(["y_p", "y_q"])
    a = mk_map(Y, B2.underlying, {"y_p": "p", "y_q": "q"})
    h = mk_map(Y, ONE, {"y_p": "*", "y_q": "*"})
    assert finord.least_extension(h, a, B2)("*") == "top"
