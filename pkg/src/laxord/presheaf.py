"""Finite presheaves on the base X valued in graphs, reflexive relations or preorders.

Levels are explicit: ``at[x]`` is a carrier with a relation ``rel[x]``, and
``restrict[x, x2]`` (for x >= x2) is a relation-preserving map. Values that are
not in the image of the embedding Pi (for instance the non-transitive H used
to test pointwise descent) are ordinary values here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from . import finord
from .errors import DiagramMismatch, InvalidStructure, PreconditionFailed
from .finord import BasePoset, FinPreorder, MonotoneMap, elem_key
from .laxcomma import LaxMorphism, LaxObject, mk_lax_object

KINDS = ("Gph", "Rel", "Ord")


class FinPresheaf:
    __slots__ = ("base", "kind", "at", "rel", "restrict")

    def __init__(self, base: BasePoset, kind: str, at: Mapping, rel: Mapping, restrict: Mapping):
        # Trusted path; mk_presheaf validates.
        self.base = base
        self.kind = kind
        self.at = {x: tuple(sorted(at[x], key=elem_key)) for x in base.elems}
        self.rel = {x: frozenset(rel[x]) for x in base.elems}
        self.restrict = {k: dict(v) for k, v in restrict.items()}

    def pairs(self):
        """Comparable pairs (x, x2) with x >= x2."""
        return [(x, x2) for x2, x in sorted(self.base.underlying.leq, key=elem_key)]

    def level(self, x) -> FinPreorder:
        return FinPreorder(self.at[x], self.rel[x])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinPresheaf):
            return NotImplemented
        return (
            self.base == other.base
            and self.kind == other.kind
            and self.at == other.at
            and self.rel == other.rel
            and self.restrict == other.restrict
        )

    def __repr__(self) -> str:
        levels = ", ".join(f"{x}:{list(self.at[x])}" for x in self.base.elems)
        return f"FinPresheaf[{self.kind}]({levels})"


def _check_relation(kind, x, carrier, rel):
    cs = set(carrier)
    for u, v in rel:
        if u not in cs or v not in cs:
            raise InvalidStructure(f"relation at {x!r} mentions unknown element", witness=(x, (u, v)))
    if kind in ("Rel", "Ord"):
        for u in carrier:
            if (u, u) not in rel:
                raise InvalidStructure(f"relation at {x!r} is not reflexive at {u!r}", witness=(x, u))
    if kind == "Ord":
        for u, v in rel:
            for v2, w in rel:
                if v == v2 and (u, w) not in rel:
                    raise InvalidStructure(f"relation at {x!r} is not transitive", witness=(x, (u, v, w)))


def mk_presheaf(base: BasePoset, kind: str, levels: Mapping, restrict: Mapping | None = None) -> FinPresheaf:
    """Validated presheaf; ``levels[x] = (elems, pairs)``.

    A missing restriction x >= x2 defaults to the identity on names when every
    element of level x also occurs at level x2.
    """
    if kind not in KINDS:
        raise InvalidStructure(f"unknown value kind {kind!r}", witness=kind)
    restrict = dict(restrict or {})
    at, rel = {}, {}
    for x in base.elems:
        if x not in levels:
            raise InvalidStructure(f"no level given for {x!r}", witness=x)
        elems, pairs = levels[x]
        if len(set(elems)) != len(elems):
            raise InvalidStructure(f"duplicate element at level {x!r}", witness=x)
        at[x] = tuple(elems)
        r = set(pairs)
        if kind in ("Rel", "Ord"):
            r |= {(u, u) for u in elems}
        _check_relation(kind, x, elems, r)
        rel[x] = r
    full = {}
    for x2, x in base.underlying.leq:
        m = restrict.get((x, x2))
        if m is None:
            if not set(at[x]) <= set(at[x2]):
                raise InvalidStructure(f"no restriction given for {x!r} >= {x2!r}", witness=(x, x2))
            m = {u: u for u in at[x]}
        full[x, x2] = dict(m)
    G = FinPresheaf(base, kind, at, rel, full)
    _validate_functor(G)
    return G


def _validate_functor(G: FinPresheaf):
    X = G.base
    for (x, x2), m in G.restrict.items():
        if set(m) != set(G.at[x]) or not set(m.values()) <= set(G.at[x2]):
            raise InvalidStructure(f"restriction {x!r} >= {x2!r} is not a map between levels", witness=(x, x2))
        for u, v in G.rel[x]:
            if (m[u], m[v]) not in G.rel[x2]:
                raise InvalidStructure(f"restriction {x!r} >= {x2!r} breaks the relation", witness=(x, x2, u, v))
    for x in X.elems:
        if any(G.restrict[x, x][u] != u for u in G.at[x]):
            raise InvalidStructure(f"restriction {x!r} >= {x!r} is not the identity", witness=(x, x))
    for x, x1, x2 in itertools.product(X.elems, repeat=3):
        if X.le(x1, x) and X.le(x2, x1):
            r01, r12, r02 = G.restrict[x, x1], G.restrict[x1, x2], G.restrict[x, x2]
            if any(r12[r01[u]] != r02[u] for u in G.at[x]):
                raise InvalidStructure("restrictions do not compose", witness=(x, x1, x2))


class NatTrans:
    __slots__ = ("src", "tgt", "components")

    def __init__(self, src: FinPresheaf, tgt: FinPresheaf, components: Mapping):
        self.src = src
        self.tgt = tgt
        self.components = {x: dict(components[x]) for x in src.base.elems}

    def __call__(self, x, u):
        return self.components[x][u]

    def __eq__(self, other) -> bool:
        if not isinstance(other, NatTrans):
            return NotImplemented
        return self.src == other.src and self.tgt == other.tgt and self.components == other.components

    def component_map(self, x) -> MonotoneMap:
        return MonotoneMap(self.src.level(x), self.tgt.level(x), self.components[x])


def mk_nat_trans(src: FinPresheaf, tgt: FinPresheaf, components: Mapping) -> NatTrans:
    if src.base != tgt.base:
        raise DiagramMismatch("natural transformation between presheaves on different bases")
    for x in src.base.elems:
        c = components.get(x)
        if c is None or set(c) != set(src.at[x]) or not set(c.values()) <= set(tgt.at[x]):
            raise InvalidStructure(f"component at {x!r} is not a map between levels", witness=x)
        for u, v in src.rel[x]:
            if (c[u], c[v]) not in tgt.rel[x]:
                raise InvalidStructure(f"component at {x!r} breaks the relation", witness=(x, u, v))
    for (x, x2), r in src.restrict.items():
        s = tgt.restrict[x, x2]
        for u in src.at[x]:
            if components[x2][r[u]] != s[components[x][u]]:
                raise InvalidStructure("naturality square fails", witness=(x, x2, u))
    return NatTrans(src, tgt, components)


def identity_nat(F: FinPresheaf) -> NatTrans:
    return NatTrans(F, F, {x: {u: u for u in F.at[x]} for x in F.base.elems})


def compose_nat(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    if alpha.tgt != beta.src:
        raise DiagramMismatch("cannot compose natural transformations")
    return NatTrans(
        alpha.src,
        beta.tgt,
        {x: {u: beta.components[x][v] for u, v in alpha.components[x].items()} for x in alpha.src.base.elems},
    )


# --------------------------------------------------------------------------
# The embedding Pi: Ord//X -> [X^op, Ord]


def pi_functor(A: LaxObject) -> FinPresheaf:
    """Pi(Y, a)(x) = {y : x <= a(y)} with the induced order; restrictions are inclusions."""
    X, Y = A.base, A.total
    at = {x: [y for y in Y.elems if X.le(x, A(y))] for x in X.elems}
    rel = {x: [(u, v) for u, v in Y.leq if u in set(at[x]) and v in set(at[x])] for x in X.elems}
    restrict = {(x, x2): {u: u for u in at[x]} for x2, x in X.underlying.leq}
    return FinPresheaf(X, "Ord", at, rel, restrict)


def pi_on_morphism(f: LaxMorphism) -> NatTrans:
    F, G = pi_functor(f.src), pi_functor(f.tgt)
    return NatTrans(F, G, {x: {u: f(u) for u in F.at[x]} for x in F.base.elems})


def pullback_presheaf(alpha: NatTrans, beta: NatTrans):
    """Levelwise pullback of ``alpha: F -> G <- H: beta``; returns (P, pi, rho)."""
    if alpha.tgt != beta.tgt:
        raise DiagramMismatch("pullback legs must share a codomain")
    F, H = alpha.src, beta.src
    X = F.base
    at, rel = {}, {}
    for x in X.elems:
        a, b = alpha.components[x], beta.components[x]
        at[x] = [(u, v) for u in F.at[x] for v in H.at[x] if a[u] == b[v]]
        S = set(at[x])
        rel[x] = [
            ((u, v), (u2, v2))
            for (u, u2) in F.rel[x]
            for (v, v2) in H.rel[x]
            if (u, v) in S and (u2, v2) in S
        ]
    restrict = {
        (x, x2): {(u, v): (F.restrict[x, x2][u], H.restrict[x, x2][v]) for u, v in at[x]}
        for (x, x2) in F.restrict
    }
    kind = KINDS[min(KINDS.index(F.kind), KINDS.index(H.kind))]
    P = FinPresheaf(X, kind, at, rel, restrict)
    pi = NatTrans(P, F, {x: {p: p[0] for p in P.at[x]} for x in X.elems})
    rho = NatTrans(P, H, {x: {p: p[1] for p in P.at[x]} for x in X.elems})
    return P, pi, rho


def is_ord_valued(G: FinPresheaf) -> bool:
    try:
        for x in G.base.elems:
            _check_relation("Ord", x, G.at[x], G.rel[x])
    except InvalidStructure:
        return False
    return True


# --------------------------------------------------------------------------
# Pointwise descent


def presheaf_descent_failure(alpha: NatTrans):
    """None if alpha passes the descent test for its value kind, else (x, witness)."""
    kind = alpha.tgt.kind
    for x in alpha.src.base.elems:
        comp = alpha.components[x]
        if kind == "Ord":
            check = finord.lift_chains(alpha.component_map(x), 3)
            if not check:
                return (x, check.failure)
            continue
        if kind == "Gph":
            hit = set(comp.values())
            missing = [v for v in alpha.tgt.at[x] if v not in hit]
            if missing:
                return (x, (missing[0],))
        hit_edges = {(comp[u], comp[v]) for u, v in alpha.src.rel[x]}
        missing = sorted(alpha.tgt.rel[x] - hit_edges, key=elem_key)
        if missing:
            return (x, missing[0])
    return None


def descent_check_presheaf(alpha: NatTrans) -> bool:
    """Gph: surjective on vertices and edges; Rel: surjective on related pairs;
    Ord: every component lifts 3-chains."""
    return presheaf_descent_failure(alpha) is None


# --------------------------------------------------------------------------
# Isomorphism and representability


def _relation_isos(A: tuple, ra: frozenset, B: tuple, rb: frozenset) -> Iterator[dict]:
    if len(A) != len(B) or len(ra) != len(rb):
        return
    phi: dict = {}
    used: set = set()

    def rec(i):
        if i == len(A):
            yield dict(phi)
            return
        u = A[i]
        for v in B:
            if v in used or ((u, u) in ra) != ((v, v) in rb):
                continue
            if all(((u, u2) in ra) == ((v, phi[u2]) in rb) and ((u2, u) in ra) == ((phi[u2], v) in rb) for u2 in A[:i]):
                phi[u] = v
                used.add(v)
                yield from rec(i + 1)
                del phi[u]
                used.discard(v)

    yield from rec(0)


def find_presheaf_isomorphism(F: FinPresheaf, G: FinPresheaf) -> dict | None:
    """Levelwise relation isomorphisms commuting with every restriction, or None."""
    if F.base != G.base:
        return None
    X = F.base
    order = sorted(X.elems, key=lambda x: (-len(X.underlying.down(x)), elem_key(x)))
    chosen: dict = {}

    def rec(i):
        if i == len(order):
            return True
        x = order[i]
        for phi in _relation_isos(F.at[x], F.rel[x], G.at[x], G.rel[x]):
            ok = True
            for x2, psi in chosen.items():
                if X.le(x, x2):
                    # x2 >= x: phi . F(x2>=x) == G(x2>=x) . psi
                    ok = all(phi[F.restrict[x2, x][u]] == G.restrict[x2, x][psi[u]] for u in F.at[x2])
                elif X.le(x2, x):
                    ok = all(psi[F.restrict[x, x2][u]] == G.restrict[x, x2][phi[u]] for u in F.at[x])
                if not ok:
                    break
            if ok:
                chosen[x] = phi
                if rec(i + 1):
                    return True
                del chosen[x]
        return False

    return dict(chosen) if rec(0) else None


def representable_as_pi(G: FinPresheaf):
    """(LaxObject, None) with Pi of it isomorphic to G, or (None, violated condition)."""
    X = G.base
    bot = X.bottom
    if not is_ord_valued(G):
        return None, "not-ord-valued"
    images = {}
    for x in X.elems:
        r = G.restrict[x, bot]
        img = [r[u] for u in G.at[x]]
        if len(set(img)) != len(img):
            return None, "injectivity"
        for u, v in itertools.product(G.at[x], repeat=2):
            if ((u, v) in G.rel[x]) != ((r[u], r[v]) in G.rel[bot]):
                return None, "order-embedding"
        images[x] = set(img)
    W = G.level(bot)
    for x in X.elems:
        if any(v not in images[x] for u in images[x] for v in W.up(u)):
            return None, "up-closure"
    d = {}
    for w in W.elems:
        holders = {x for x in X.elems if w in images[x]}
        d[w] = X.join_all(holders)
        if holders != set(X.underlying.down(d[w])):
            return None, "join-closure"
    return mk_lax_object(W, X, d), None


# --------------------------------------------------------------------------
# Bounded obstruction search


@dataclass(frozen=True)
class Certificate:
    """A presheaf G with beta: G -> Pi(Z, b) whose pullback along Pi(f) is
    representable while G itself is not."""

    cursor: int
    G: FinPresheaf
    beta: dict
    reason: str

    def as_dict(self) -> dict:
        X = self.G.base
        return {
            "cursor": self.cursor,
            "reason": self.reason,
            "levels": {str(x): list(self.G.at[x]) for x in X.elems},
            "order": sorted([list(p) for p in self.G.rel[X.bottom] if p[0] != p[1]]),
            "beta": {str(w): self.beta[w] for w in sorted(self.beta, key=elem_key)},
        }


def _labelled_preorders(names):
    off = [(u, v) for u in names for v in names if u != v]
    seen = set()
    for r in range(len(off) + 1):
        for pairs in itertools.combinations(off, r):
            P = FinPreorder.closure(names, pairs)
            if len(P.leq) - len(names) == r and P not in seen:
                seen.add(P)
                yield P


def _antitone_families(X: BasePoset, W: tuple):
    """Maps x -> subset of W with L(bottom) = W and x >= x2 implying L(x) <= L(x2)."""
    order = sorted(X.elems, key=lambda x: (len(X.underlying.down(x)), elem_key(x)))
    L: dict = {}

    def rec(i):
        if i == len(order):
            yield dict(L)
            return
        x = order[i]
        if x == X.bottom:
            allowed = set(W)
        else:
            allowed = set(W)
            for x2 in X.underlying.down(x):
                if x2 != x:
                    allowed &= L[x2]
        cand = sorted(allowed, key=elem_key)
        subsets = [frozenset(W)] if x == X.bottom else [
            frozenset(c) for r in range(len(cand) + 1) for c in itertools.combinations(cand, r)
        ]
        for s in subsets:
            L[x] = s
            yield from rec(i + 1)
        del L[x]

    yield from rec(0)


def iter_obstructions(f: LaxMorphism, bound: int, start: int = 0, require_precondition: bool = True):
    """Yield certificates (see :class:`Certificate`) in canonical order.

    Candidates G have levels that are subsets of G(bottom) with the induced
    order and inclusions as restrictions; ``start`` resumes at a cursor.
    """
    alpha = pi_on_morphism(f)
    if require_precondition:
        failure = presheaf_descent_failure(alpha)
        if failure is not None:
            raise PreconditionFailed(
                f"Pi(f) is not effective for descent in [X^op, Ord] (level {failure[0]!r})",
                witness=failure,
            )
    X = f.src.base
    target = alpha.tgt
    cursor = 0
    for k in range(bound + 1):
        names = tuple(f"w{i}" for i in range(k))
        for W in _labelled_preorders(names):
            for L in _antitone_families(X, names):
                at = {x: sorted(L[x], key=elem_key) for x in X.elems}
                rel = {x: [(u, v) for u, v in W.leq if u in L[x] and v in L[x]] for x in X.elems}
                restrict = {(x, x2): {u: u for u in at[x]} for x2, x in X.underlying.leq}
                G = FinPresheaf(X, "Ord", at, rel, restrict)
                G_rep = None
                allowed = {w: [z for z in target.at[X.bottom] if all(z in target.at[x] for x in X.elems if w in L[x])] for w in names}
                for m in finord.monotone_maps(W, f.tgt.total, allowed=allowed.__getitem__):
                    cursor += 1
                    if cursor <= start:
                        continue
                    beta = NatTrans(G, target, {x: {u: m(u) for u in at[x]} for x in X.elems})
                    P, _, _ = pullback_presheaf(alpha, beta)
                    if representable_as_pi(P)[0] is None:
                        continue
                    if G_rep is None:
                        G_rep = representable_as_pi(G)
                    if G_rep[0] is None:
                        yield Certificate(cursor, G, dict(m.table), G_rep[1])


def obstruction_search(f: LaxMorphism, bound: int, require_precondition: bool = True) -> list:
    """Every certificate up to ``bound``; an empty list is inconclusive, never a proof."""
    return list(iter_obstructions(f, bound, require_precondition=require_precondition))
