from pathlib import Path

import pytest
from hypothesis import given

from laxord import dsl
from laxord.presheaf import find_presheaf_isomorphism, pi_functor

from conftest import lax_morphisms

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_zz_document():
    ws = dsl.parse((FIXTURES / "zz.lax").read_text())
    assert len(ws) == 3
    assert ws.names() == ["ZZ", "C3", "fzz"]
    assert ws["fzz"]("b2") == "z2"


@pytest.mark.parametrize("name", ["zz.lax", "descent.lax", "exponential.lax", "presheaf.lax"])
def test_round_trip(name):
    ws = dsl.parse((FIXTURES / name).read_text())
    again = dsl.parse(dsl.format_workspace(ws))
    assert again.names() == ws.names()
    assert again.entries == ws.entries


def test_non_monotone_map_names_pair():
    doc = "poset C { elems: 0 1; le: 0 1; }\nmap swap : C -> C { 0 -> 1; 1 -> 0; }\n"
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse(doc)
    assert err.value.witness == ("0", "1")
    assert err.value.line == 2


def test_duplicate_name():
    with pytest.raises(dsl.ParseError, match="duplicate name"):
        dsl.parse("preorder A { elems: x; }\npreorder A { elems: y; }")


@pytest.mark.parametrize(
    "doc,fragment",
    [
        ("preorder A { elems: x; ", "end of input"),
        ("preorder A elems", "expected '{'"),
        ("widget A { }", "unknown declaration"),
        ("map f : P -> Q { }", "unresolved reference"),
        ("preorder A { elems: x; le: x y; }", "y"),
        ("preorder A { le: x x; }", "missing 'elems:'"),
        ("poset P { elems: a b; }", "top or bottom"),
        ("lax L = (C2, id) over C3", ""),
        ("preorder A { elems: x; }\nlax L = (A, A) over C2", "is a preorder"),
        ("preorder A { elems: $; } %", "line 1"),
    ],
)
def test_errors(doc, fragment):
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse(doc)
    assert fragment in str(err.value)


def test_error_position():
    with pytest.raises(dsl.ParseError) as err:
        dsl.parse("# header\npreorder A { elems: x; }\n  bogus")
    assert (err.value.line, err.value.col) == (3, 3)


def test_comments_and_whitespace_ignored():
    a = dsl.parse("preorder A{elems:x y;le:x y;}")
    b = dsl.parse("# c\npreorder   A {\n  elems: x y;   # two\n  le: x y;\n}\n")
    assert a.entries == b.entries


def test_builtin_bases_and_identity_structure():
    ws = dsl.parse("lax I = (B2, id) over B2\n")
    assert ws["I"]("p") == "p"
    assert "lax I = (B2, id) over B2" in dsl.format_workspace(ws)


def test_presheaf_declaration():
    ws = dsl.parse((FIXTURES / "presheaf.lax").read_text())
    G = ws["G"]
    assert G.kind == "Ord" and G.at["top"] == ()
    assert find_presheaf_isomorphism(ws["PiA"], pi_functor(ws["A"])) is not None


@given(lax_morphisms(max_size=3))
def test_generated_morphisms_round_trip(f):
    ws = dsl.Workspace()
    ws.add("preorder", "Y", f.src.total)
    ws.add("preorder", "Z", f.tgt.total)
    ws.add("map", "a", f.src.structure)
    ws.add("map", "b", f.tgt.structure)
    ws.add("map", "m", f.map)
    ws.add("lax", "A", f.src)
    ws.add("lax", "B", f.tgt)
    ws.add("laxmor", "f", f)
    again = dsl.parse(dsl.format_workspace(ws))
    assert again["f"] == f
