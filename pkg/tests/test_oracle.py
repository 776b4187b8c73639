import pytest

from laxord import descent, laxcomma as lc, oracle
from laxord.finord import MonotoneMap
from laxord.fixtures import B2, C2, C3, ONE, fzz_lax, gap_fixture
from laxord.laxcomma import Construction, LaxMorphism, LaxObject


def point(X, x):
    return lc.mk_lax_object(ONE, X, {"*": x})


def ident(X):
    return lc.mk_lax_object(X.underlying, X, {x: x for x in X.elems})


def test_generation_is_deterministic():
    cfg = oracle.GenConfig(seed=1, max_elems=3)
    a = oracle.take(oracle.generate(cfg, "preorder"), 50)
    b = oracle.take(oracle.generate(cfg, "preorder"), 50)
    assert a == b
    assert all(len(P) <= 3 for P in a)


def test_density_zero_gives_discrete():
    cfg = oracle.GenConfig(seed=4, max_elems=4, density=0.0)
    assert all(P.is_discrete() for P in oracle.take(oracle.generate(cfg, "preorder"), 100))


@pytest.mark.parametrize("kind", ["lax_object", "lax_morphism", "parallel_pair", "cospan", "family", "base"])
def test_generated_instances_validate(kind):
    cfg = oracle.GenConfig(seed=11, max_elems=3, base_pool=(C2,))
    for item in oracle.take(oracle.generate(cfg, kind), 60):
        if kind == "lax_object":
            lc.mk_lax_object(item.total, item.base, item.structure)
        elif kind == "lax_morphism":
            lc.mk_lax_morphism(item.src, item.tgt, item.map)
        elif kind in ("parallel_pair", "cospan"):
            for f in item:
                lc.mk_lax_morphism(f.src, f.tgt, f.map)
        elif kind == "family":
            Y, family, X = item
            for m, T in family:
                assert m.dom == Y and T.base == X
        else:
            assert item is C2


def test_verify_universal_accepts_constructions():
    A, B = ident(C2), point(C2, "1")
    assert oracle.verify_universal("limit", lc.product_lax([A, B]))[0]
    assert oracle.verify_universal("colimit", lc.coproduct_lax([A, B]))[0]
    assert oracle.verify_universal("exponential", lc.exponential_lax(A, B))[0]
    assert oracle.verify_universal("exponential", lc.exponential_lax(point(C2, "0"), A))[0]
    assert oracle.verify_universal("power", lc.power_copower("power", C2.underlying, A))[0]
    assert oracle.verify_universal("copower", lc.power_copower("copower", C2.underlying, A))[0]
    f = fzz_lax()
    assert oracle.verify_universal("limit", lc.pullback_lax(f, f), bound=1)[0]


def test_verify_universal_rejects_corrupted_product():
    p, q = point(B2, "p"), point(B2, "q")
    good = lc.product_lax([p, q])
    P = good.obj.total
    bad_obj = LaxObject(B2, P, MonotoneMap(P, B2.underlying, {u: B2.join(p(u[0]), q(u[1])) for u in P.elems}))
    bad = Construction("product", bad_obj, tuple(LaxMorphism(bad_obj, leg.tgt, leg.map) for leg in good.legs),
                       good.diagram)
    ok, witness = oracle.verify_universal("limit", bad)
    assert not ok and witness is not None


def test_regular_epi_oracle_examples():
    i = lc.identity_lax(ident(C3))
    assert oracle.regular_epi_oracle(i, "ord") and oracle.regular_epi_oracle(i, "lax")
    f = lc.mk_lax_morphism(point(C2, "0"), point(C2, "1"), {"*": "*"})
    assert oracle.regular_epi_oracle(f, "ord")
    assert not oracle.regular_epi_oracle(f, "lax")
    assert oracle.regular_epi_oracle(fzz_lax(), "lax")


def test_stable_oracle_examples():
    assert oracle.stable_oracle(lc.identity_lax(ident(C2)))[0]
    # b(z) above the join of its fibre: pulling back along the point at z breaks regularity
    f = lc.mk_lax_morphism(point(C2, "0"), point(C2, "1"), {"*": "*"})
    ok, g = oracle.stable_oracle(f)
    assert not ok and g.tgt == f.tgt
    assert oracle.stable_oracle(gap_fixture(), bound=2)[0]


def test_characterizations_agree_on_samples():
    cfg = oracle.GenConfig(seed=5, max_elems=3)
    for f in oracle.take(oracle.generate(cfg, "lax_morphism"), 150):
        assert descent.is_regular_epi_lax(f) == oracle.regular_epi_oracle(f, "lax")
    for f in oracle.take(oracle.generate(cfg, "lax_morphism"), 40):
        assert descent.is_stable_regular_epi_lax(f) == oracle.stable_oracle(f, 2)[0]


def test_canonical_form_is_iso_invariant():
    f = gap_fixture()
    g = oracle.relabel_canonical(f)
    assert oracle.canonical_form(f) == oracle.canonical_form(g)
    assert oracle.canonical_form(f) != oracle.canonical_form(fzz_lax())


def test_is_gap_fixture():
    gap, verdict = oracle.is_gap(gap_fixture())
    assert gap and verdict.verdict is descent.Verdict.UNKNOWN
    assert not oracle.is_gap(fzz_lax())[0]


def test_gap_hunter_finds_fixture_once():
    cfg = oracle.GenConfig(seed=7, max_elems=2, base_pool=(B2,))
    found = oracle.gap_hunter(cfg, 3000)
    target = oracle.canonical_form(gap_fixture())
    assert [g.canonical for g in found].count(target) == 1
    for g in found:
        assert g.evidence["stable_regepi_lax"] and g.evidence["ED_ord"] and not g.evidence["PED"]


def test_gap_hunter_records_obstruction_refusal():
    cfg = oracle.GenConfig(seed=7, max_elems=2, base_pool=(B2,))
    found = oracle.gap_hunter(cfg, 3000, obstruction_bound=1)
    assert found and all("refused" in g.obstruction for g in found)


def test_constant_top_over_c2_has_no_gap():
    cfg = oracle.GenConfig(seed=2, max_elems=3, base_pool=(C2,))
    for f in oracle.take(oracle.generate(cfg, "lax_morphism"), 300):
        A = LaxObject(C2, f.src.total, MonotoneMap(f.src.total, C2.underlying, {y: "1" for y in f.src.total.elems}))
        B = LaxObject(C2, f.tgt.total, MonotoneMap(f.tgt.total, C2.underlying, {z: "1" for z in f.tgt.total.elems}))
        assert not oracle.is_gap(LaxMorphism(A, B, f.map))[0]


def test_test_objects_counts():
    assert [len(oracle.test_objects(C2, n)) for n in (1, 2)] == [3, 11]
    assert [len(oracle.test_objects(B2, n)) for n in (1, 2)] == [5, 28]
