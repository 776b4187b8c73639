"""The lax comma category Ord//X over a finite complete base X.

Objects are monotone maps ``a: Y -> X``; a morphism ``(Y, a) -> (Z, b)`` is a
monotone ``f`` with ``a <= b.f`` pointwise. Every construction here returns a
:class:`Construction` carrying the object, its structure morphisms and the
diagram it was built from, so the oracle can re-check universality.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import finord
from .errors import DiagramMismatch, LaxTriangleViolation, NotExponentiable
from .finord import BasePoset, FinPreorder, MonotoneMap, apply_graph, elem_key


class LaxObject:
    """A pair (Y, a) with ``a: Y -> X`` monotone."""

    __slots__ = ("base", "total", "structure", "_hash")

    def __init__(self, base: BasePoset, total: FinPreorder, structure: MonotoneMap):
        self.base = base
        self.total = total
        self.structure = structure
        self._hash = None

    def __call__(self, y):
        return self.structure.table[y]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaxObject):
            return NotImplemented
        return self.base == other.base and self.total == other.total and self.structure == other.structure

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.base, self.total, self.structure.graph()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{y!r}:{x!r}" for y, x in self.structure.graph())
        return f"LaxObject({{{body}}} over {self.base!r})"

    def __len__(self) -> int:
        return len(self.total)


def mk_lax_object(total: FinPreorder, base: BasePoset, structure) -> LaxObject:
    if not isinstance(structure, MonotoneMap):
        structure = finord.mk_map(total, base.underlying, structure)
    elif structure.dom != total or structure.cod != base.underlying:
        raise DiagramMismatch("structure map must go from the carrier to the base")
    return LaxObject(base, total, structure)


def constant_object(total: FinPreorder, base: BasePoset, x) -> LaxObject:
    return LaxObject(base, total, MonotoneMap(total, base.underlying, {y: x for y in total.elems}))


class LaxMorphism:
    """A monotone map f with a(y) <= b(f(y)); ``strict`` records a = b.f."""

    __slots__ = ("src", "tgt", "map", "strict", "_hash")

    def __init__(self, src: LaxObject, tgt: LaxObject, map: MonotoneMap):
        self.src = src
        self.tgt = tgt
        self.map = map
        self.strict = all(src(y) == tgt(map.table[y]) for y in src.total.elems)
        self._hash = None

    def __call__(self, y):
        return self.map.table[y]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaxMorphism):
            return NotImplemented
        return self.src == other.src and self.tgt == other.tgt and self.map == other.map

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.src, self.tgt, self.map.graph()))
        return self._hash

    def __repr__(self) -> str:
        return f"LaxMorphism({self.map!r})"


def mk_lax_morphism(src: LaxObject, tgt: LaxObject, f) -> LaxMorphism:
    if src.base != tgt.base:
        raise DiagramMismatch("source and target live over different bases")
    if not isinstance(f, MonotoneMap):
        f = finord.mk_map(src.total, tgt.total, f)
    elif f.dom != src.total or f.cod != tgt.total:
        raise DiagramMismatch("map does not go between the given carriers")
    X = src.base
    for y in src.total.elems:
        if not X.le(src(y), tgt(f(y))):
            raise LaxTriangleViolation(
                f"lax triangle fails at {y!r}: {src(y)!r} !<= {tgt(f(y))!r}", witness=y
            )
    return LaxMorphism(src, tgt, f)


def identity_lax(A: LaxObject) -> LaxMorphism:
    return LaxMorphism(A, A, finord.identity(A.total))


def compose_lax(g: LaxMorphism, f: LaxMorphism) -> LaxMorphism:
    if f.tgt != g.src:
        raise DiagramMismatch("cannot compose: target of f is not the source of g")
    return LaxMorphism(f.src, g.tgt, finord.compose(g.map, f.map))


def leq_2cell(f: LaxMorphism, g: LaxMorphism) -> bool:
    if f.src != g.src or f.tgt != g.tgt:
        raise DiagramMismatch("2-cells compare parallel morphisms only")
    Z = f.tgt.total
    return all(Z.le(f(y), g(y)) for y in f.src.total.elems)


def lax_morphisms(A: LaxObject, B: LaxObject) -> Iterator[LaxMorphism]:
    """Every morphism A -> B in Ord//X, in lexicographic order of graphs."""
    X = A.base
    fits = {y: [z for z in B.total.elems if X.le(A(y), B(z))] for y in A.total.elems}
    for m in finord.monotone_maps(A.total, B.total, allowed=fits.__getitem__):
        yield LaxMorphism(A, B, m)


def find_lax_isomorphism(A: LaxObject, B: LaxObject) -> dict | None:
    if A.base != B.base:
        return None
    return finord.find_isomorphism(A.total, B.total, A.structure.table.get, B.structure.table.get)


def isomorphic_lax(A: LaxObject, B: LaxObject) -> bool:
    return find_lax_isomorphism(A, B) is not None


# --------------------------------------------------------------------------
# Constructions


@dataclass(frozen=True)
class Construction:
    kind: str
    obj: LaxObject
    legs: tuple
    diagram: dict = field(default_factory=dict, compare=False)


def _common_base(objs, base):
    bases = {A.base for A in objs}
    if base is not None:
        bases.add(base)
    if len(bases) != 1:
        raise DiagramMismatch("objects must share exactly one base (pass base= for empty families)")
    return bases.pop()


def initial_lift(Y: FinPreorder, family: Sequence, base: BasePoset | None = None) -> Construction:
    """Largest structure on Y making every ``f_i: Y -> Z_i`` a lax morphism.

    ``family`` holds pairs ``(f_i, (Z_i, b_i))``; the lift is a(y) = meet_i b_i(f_i(y)).
    """
    family = list(family)
    X = _common_base([t for _, t in family], base)
    for f, t in family:
        if f.dom != Y or f.cod != t.total:
            raise DiagramMismatch("each map must go from Y to the carrier of its target")
    a = {y: X.meet_all(t(f(y)) for f, t in family) for y in Y.elems}
    A = LaxObject(X, Y, MonotoneMap(Y, X.underlying, a))
    legs = tuple(LaxMorphism(A, t, f) for f, t in family)
    return Construction("initial_lift", A, legs, {"family": family, "base": X})


def product_lax(objs: Sequence[LaxObject], base: BasePoset | None = None) -> Construction:
    objs = list(objs)
    X = _common_base(objs, base)
    P, projs = finord.product_ord([A.total for A in objs])
    a = {u: X.meet_all(A(c) for A, c in zip(objs, u)) for u in P.elems}
    Pa = LaxObject(X, P, MonotoneMap(P, X.underlying, a))
    legs = tuple(LaxMorphism(Pa, A, p) for A, p in zip(objs, projs))
    return Construction("product", Pa, legs, {"factors": objs, "base": X})


def equalizer_lax(f: LaxMorphism, g: LaxMorphism) -> Construction:
    if f.src != g.src or f.tgt != g.tgt:
        raise DiagramMismatch("parallel pair must share source and target")
    M, (m,) = finord.equalizer_ord(f.map, g.map)
    A = f.src
    Ma = LaxObject(A.base, M, MonotoneMap(M, A.base.underlying, {y: A(y) for y in M.elems}))
    return Construction("equalizer", Ma, (LaxMorphism(Ma, A, m),), {"pair": (f, g)})


def pullback_lax(f: LaxMorphism, g: LaxMorphism) -> Construction:
    """Pullback of ``f: (Y,a) -> (Z,b) <- (W,c): g``; structure a.p1 meet c.p2."""
    if f.tgt != g.tgt:
        raise DiagramMismatch("cospan legs must share a target")
    A, C = f.src, g.src
    X = A.base
    P, (p1, p2) = finord.pullback_ord(f.map, g.map)
    Pc = LaxObject(X, P, MonotoneMap(P, X.underlying, {(y, w): X.meet(A(y), C(w)) for y, w in P.elems}))
    legs = (LaxMorphism(Pc, A, p1), LaxMorphism(Pc, C, p2))
    return Construction("pullback", Pc, legs, {"cospan": (f, g)})


def limits_lax(kind: str, data, base: BasePoset | None = None) -> Construction:
    if kind == "product":
        return product_lax(data, base)
    if kind == "equalizer":
        return equalizer_lax(*data)
    if kind == "pullback":
        return pullback_lax(*data)
    raise ValueError(f"unknown limit kind {kind!r}")


def coproduct_lax(objs: Sequence[LaxObject], base: BasePoset | None = None) -> Construction:
    objs = list(objs)
    X = _common_base(objs, base)
    C, injs = finord.coproduct_ord([A.total for A in objs])
    Cb = LaxObject(X, C, MonotoneMap(C, X.underlying, {(i, e): objs[i](e) for i, e in C.elems}))
    legs = tuple(LaxMorphism(A, Cb, j) for A, j in zip(objs, injs))
    return Construction("coproduct", Cb, legs, {"summands": objs, "base": X})


def coequalizer_lax(f: LaxMorphism, g: LaxMorphism) -> Construction:
    """Coequalizer in Ord, with the least structure c making the quotient lax."""
    if f.src != g.src or f.tgt != g.tgt:
        raise DiagramMismatch("parallel pair must share source and target")
    B = f.tgt
    W, (h,) = finord.coequalizer_ord(f.map, g.map)
    c = finord.least_extension(h, B.structure, B.base)
    Wc = LaxObject(B.base, W, c)
    return Construction("coequalizer", Wc, (LaxMorphism(B, Wc, h),), {"pair": (f, g)})


def colimits_lax(kind: str, data, base: BasePoset | None = None) -> Construction:
    if kind == "coproduct":
        return coproduct_lax(data, base)
    if kind == "coequalizer":
        return coequalizer_lax(*data)
    raise ValueError(f"unknown colimit kind {kind!r}")


def power_copower(kind: str, W: FinPreorder, A: LaxObject) -> Construction:
    """Copower W (x) A = (W x Y, (w, y) -> a(y)); power W -| A = (Y^W, f -> meet_w a(f(w)))."""
    X = A.base
    if kind == "copower":
        P, _ = finord.product_ord([W, A.total])
        s = {(w, y): A(y) for w, y in P.elems}
    elif kind == "power":
        P = finord.exponential_ord(W, A.total)
        s = {f: X.meet_all(A(y) for _, y in f) for f in P.elems}
    else:
        raise ValueError(f"kind must be 'power' or 'copower', not {kind!r}")
    return Construction(kind, LaxObject(X, P, MonotoneMap(P, X.underlying, s)), (), {"W": W, "A": A})


def exponentiability_witnesses(A: LaxObject) -> list:
    """Carrier elements y whose a(y) is not exponentiable in X."""
    return [y for y in A.total.elems if not finord.is_exponentiable_element(A.base, A(y))]


def is_exponentiable_lax(A: LaxObject) -> bool:
    return not exponentiability_witnesses(A)


@functools.lru_cache(maxsize=4096)
def exponential_lax(A: LaxObject, B: LaxObject) -> Construction:
    """(Z^Y, b^a) with b^a(f) = meet_y b(f(y))^{a(y)}, and its evaluation morphism."""
    if A.base != B.base:
        raise DiagramMismatch("exponent and target live over different bases")
    bad = exponentiability_witnesses(A)
    if bad:
        raise NotExponentiable(
            f"exponent is not exponentiable: a({bad[0]!r}) = {A(bad[0])!r} has no implication",
            witness=bad,
        )
    X = A.base
    E = finord.exponential_ord(A.total, B.total)
    s = {f: X.meet_all(finord.heyting_impl(X, A(y), B(z)) for y, z in f) for f in E.elems}
    Eb = LaxObject(X, E, MonotoneMap(E, X.underlying, s))
    prod = product_lax([Eb, A])
    ev = mk_lax_morphism(prod.obj, B, {(f, y): apply_graph(f, y) for f, y in prod.obj.total.elems})
    return Construction("exponential", Eb, (ev,), {"exponent": A, "target": B, "product": prod})


def curry_lax(h: LaxMorphism, left: LaxObject, right: LaxObject) -> LaxMorphism:
    """Transpose of ``h: left x right -> B`` into ``left -> B^right``."""
    prod = product_lax([left, right])
    if h.src != prod.obj:
        raise DiagramMismatch("h must start at the product of left and right")
    E = exponential_lax(right, h.tgt).obj
    Y = right.total.elems
    return mk_lax_morphism(left, E, {w: tuple((y, h((w, y))) for y in Y) for w in left.total.elems})


def uncurry_lax(k: LaxMorphism, right: LaxObject, target: LaxObject) -> LaxMorphism:
    """Inverse of curry: ``(w, y) -> k(w)(y)`` for ``k: left -> target^right``."""
    if k.tgt != exponential_lax(right, target).obj:
        raise DiagramMismatch("k must land in the exponential target^right")
    prod = product_lax([k.src, right])
    return mk_lax_morphism(prod.obj, target, {(w, y): apply_graph(k(w), y) for w, y in prod.obj.total.elems})


def is_exponentiable_strict(A: LaxObject) -> bool:
    return strict_exponentiability_failure(A) is None


def strict_exponentiability_failure(A: LaxObject):
    """First (y0, y1, x) violating the Ord/X exponentiability criterion, or None."""
    Y, X = A.total, A.base
    for y0, y1 in sorted(Y.leq, key=elem_key):
        for x in X.elems:
            if X.le(A(y0), x) and X.le(x, A(y1)):
                if not any(Y.le(y0, y) and Y.le(y, y1) and A(y) == x for y in Y.elems):
                    return (y0, y1, x)
    return None
