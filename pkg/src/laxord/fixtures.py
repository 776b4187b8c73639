"""Named base posets and the small instances used throughout the tests and CLI."""

from __future__ import annotations

import itertools

from .finord import BasePoset, FinPreorder, mk_map, mk_poset, mk_preorder


def chain(names, name=None) -> BasePoset:
    names = list(names)
    return mk_poset(names, list(zip(names, names[1:])), name=name)


def boolean_algebra(atoms: str, name=None) -> BasePoset:
    """Subsets of ``atoms``; the empty set is named '0'."""
    subsets = [
        "".join(c) or "0" for r in range(len(atoms) + 1) for c in itertools.combinations(atoms, r)
    ]
    covers = [(s, t) for s in subsets for t in subsets if set(s) - {"0"} < set(t) - {"0"}]
    return mk_poset(subsets, covers, name=name)


C2 = chain(["0", "1"], name="C2")
C3 = chain(["z0", "z1", "z2"], name="C3")
B2 = mk_poset(["bot", "p", "q", "top"], [("bot", "p"), ("bot", "q"), ("p", "top"), ("q", "top")], name="B2")
B3 = boolean_algebra("xyz", name="B3")
M3 = mk_poset(
    ["bot", "a", "b", "c", "top"],
    [("bot", "a"), ("bot", "b"), ("bot", "c"), ("a", "top"), ("b", "top"), ("c", "top")],
    name="M3",
)
N5 = mk_poset(
    ["bot", "a", "b", "c", "top"],
    [("bot", "a"), ("a", "b"), ("b", "top"), ("bot", "c"), ("c", "top")],
    name="N5",
)

BASES = {X.name: X for X in (C2, C3, B2, B3, M3, N5)}

ONE = mk_preorder(["*"])
EMPTY = mk_preorder([])


def zigzag() -> FinPreorder:
    """a0 <= a1, a0 <= b2, b1 <= b2: every comparable pair of C3 lifts but z0<=z1<=z2 does not."""
    return mk_preorder(["a0", "a1", "b1", "b2"], [("a0", "a1"), ("a0", "b2"), ("b1", "b2")])


def two_chains() -> FinPreorder:
    """a0 <= a1 and b1 <= b2 with nothing else; (z0, z2) has no lift under fzz."""
    return mk_preorder(["a0", "a1", "b1", "b2"], [("a0", "a1"), ("b1", "b2")])


FZZ_TABLE = {"a0": "z0", "a1": "z1", "b1": "z1", "b2": "z2"}


def fzz(source: FinPreorder | None = None):
    """The map ZZ -> C3 (as a MonotoneMap onto the C3 carrier)."""
    return mk_map(source or zigzag(), C3.underlying, FZZ_TABLE)


def fzz_lax():
    """fzz over X = C3 with b = identity on C3 and a = b.fzz."""
    from .laxcomma import mk_lax_morphism, mk_lax_object

    f = fzz()
    tgt = mk_lax_object(C3.underlying, C3, {z: z for z in C3.elems})
    src = mk_lax_object(f.dom, C3, dict(f.table))
    return mk_lax_morphism(src, tgt, f)


def gap_fixture():
    """Two discrete points over p and q in B2 mapped to the point over top."""
    from .laxcomma import mk_lax_morphism, mk_lax_object

    Y = mk_preorder(["y_p", "y_q"])
    src = mk_lax_object(Y, B2, {"y_p": "p", "y_q": "q"})
    tgt = mk_lax_object(ONE, B2, {"*": "top"})
    return mk_lax_morphism(src, tgt, {"y_p": "*", "y_q": "*"})
