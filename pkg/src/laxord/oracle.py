"""Seeded generators and brute-force oracles.

The oracles work from definitions only: hom-set enumeration for universal
properties, kernel pairs and exhaustively minimised structures for regular
epimorphisms, explicit pullbacks for stability. They never call the
closed-form characterisations they are used to validate.
"""

from __future__ import annotations

import functools
import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Iterator

from . import finord
from .descent import descent_verdict
from .errors import PreconditionFailed
from .finord import BasePoset, FinPreorder, MonotoneMap, apply_graph, elem_key
from .fixtures import B2, C2, C3
from .laxcomma import Construction, LaxMorphism, LaxObject, lax_morphisms

log = logging.getLogger(__name__)

RETRY_BUDGET = 1000


@dataclass(frozen=True)
class GenConfig:
    seed: int
    max_elems: int = 3
    base_pool: tuple = (C2, C3, B2)
    density: float = 0.4


# --------------------------------------------------------------------------
# Generation


def random_preorder(rng: random.Random, n: int, density: float, prefix: str = "e") -> FinPreorder:
    names = [f"{prefix}{i}" for i in range(n)]
    pairs = [(u, v) for u in names for v in names if u != v and rng.random() < density]
    return FinPreorder.closure(names, pairs)


def random_monotone(
    rng: random.Random, dom: FinPreorder, cod: FinPreorder, allowed=None, budget: int = RETRY_BUDGET
) -> MonotoneMap | None:
    """A uniformly-ordered random backtracking search; None once ``budget`` dead ends are spent."""
    order = list(dom.elems)
    img: dict = {}
    dead = 0

    def rec(i):
        nonlocal dead
        if i == len(order):
            return True
        e = order[i]
        cands = list(allowed(e)) if allowed else list(cod.elems)
        rng.shuffle(cands)
        for c in cands:
            if all(cod.le(img[d], c) for d in order[:i] if dom.le(d, e)) and all(
                cod.le(c, img[d]) for d in order[:i] if dom.le(e, d)
            ):
                img[e] = c
                if rec(i + 1):
                    return True
                del img[e]
            dead += 1
            if dead > budget:
                return False
        return False

    if rec(0):
        return MonotoneMap(dom, cod, img)
    return None


def _size(rng, cfg):
    if rng.random() < 0.05:
        return 0
    return rng.randint(1, max(1, cfg.max_elems))


def _lax_object(rng, cfg, X, prefix):
    Y = random_preorder(rng, _size(rng, cfg), cfg.density, prefix)
    a = random_monotone(rng, Y, X.underlying)
    return LaxObject(X, Y, a) if a is not None else None


def _lax_map(rng, A: LaxObject, B: LaxObject, prefer_surjective=False):
    X = A.base
    allowed = lambda y: [z for z in B.total.elems if X.le(A(y), B(z))]
    first = None
    for _ in range(20 if prefer_surjective else 1):
        m = random_monotone(rng, A.total, B.total, allowed)
        if m is None:
            return None
        first = first or m
        if not prefer_surjective or m.is_surjective():
            return LaxMorphism(A, B, m)
    return LaxMorphism(A, B, first)


def _lax_morphism(rng, cfg, X):
    B = _lax_object(rng, cfg, X, "z")
    if B is None:
        return None
    Y = random_preorder(rng, _size(rng, cfg), cfg.density, "y")
    f = None
    for _ in range(20):
        f = random_monotone(rng, Y, B.total)
        if f is None or f.is_surjective():
            break
    if f is None:
        return None
    if rng.random() < 0.3:
        a = MonotoneMap(Y, X.underlying, {y: B(f(y)) for y in Y.elems})
    else:
        a = random_monotone(rng, Y, X.underlying, lambda y: sorted(X.underlying.down(B(f(y))), key=elem_key))
    if a is None:
        return None
    return LaxMorphism(LaxObject(X, Y, a), B, f)


def _one(rng, cfg, kind):
    X = rng.choice(list(cfg.base_pool))
    if kind == "preorder":
        return random_preorder(rng, _size(rng, cfg), cfg.density)
    if kind == "base":
        return X
    if kind == "lax_object":
        return _lax_object(rng, cfg, X, "y")
    if kind == "lax_morphism":
        return _lax_morphism(rng, cfg, X)
    if kind in ("parallel_pair", "cospan"):
        A = _lax_object(rng, cfg, X, "y")
        B = _lax_object(rng, cfg, X, "z")
        if A is None or B is None:
            return None
        if kind == "cospan":
            f = _lax_map(rng, A, B)
            W = _lax_object(rng, cfg, X, "w")
            g = _lax_map(rng, W, B) if W is not None else None
        else:
            f, g = _lax_map(rng, A, B), _lax_map(rng, A, B)
        return (f, g) if f is not None and g is not None else None
    if kind == "family":
        Y = random_preorder(rng, _size(rng, cfg), cfg.density, "y")
        family = []
        for i in range(rng.randint(0, 3)):
            T = _lax_object(rng, cfg, X, f"t{i}_")
            m = random_monotone(rng, Y, T.total) if T is not None else None
            if m is None:
                return None
            family.append((m, T))
        return (Y, family, X)
    raise ValueError(f"unknown generator kind {kind!r}")


def generate(cfg: GenConfig, kind: str) -> Iterator:
    """Deterministic infinite stream of instances of ``kind``.

    Kinds: preorder, base, lax_object, lax_morphism, parallel_pair, cospan,
    family (a source preorder with maps into lax objects, plus the base).
    """
    rng = random.Random(cfg.seed)
    while True:
        for _ in range(RETRY_BUDGET):
            item = _one(rng, cfg, kind)
            if item is not None:
                yield item
                break
        else:
            log.warning("generator %s exhausted its retry budget; skipping", kind)


def take(stream, n: int) -> list:
    return list(itertools.islice(stream, n))


# --------------------------------------------------------------------------
# Small test objects


@functools.lru_cache(maxsize=None)
def preorders_up_to_iso(n: int) -> tuple:
    names = [f"w{i}" for i in range(n)]
    off = [(u, v) for u in names for v in names if u != v]
    reps: list = []
    seen = set()
    for r in range(len(off) + 1):
        for pairs in itertools.combinations(off, r):
            P = FinPreorder.closure(names, pairs)
            if P in seen:
                continue
            seen.add(P)
            if not any(finord.find_isomorphism(P, Q) for Q in reps):
                reps.append(P)
    return tuple(reps)


@functools.lru_cache(maxsize=None)
def test_objects(X: BasePoset, bound: int) -> tuple:
    """Lax objects with carriers of size <= bound, one per isomorphism class."""
    out = []
    for n in range(bound + 1):
        for W in preorders_up_to_iso(n):
            reps: list = []
            for c in finord.monotone_maps(W, X.underlying):
                A = LaxObject(X, W, c)
                if not any(
                    finord.find_isomorphism(W, W, c.table.get, B.structure.table.get) for B in reps
                ):
                    reps.append(A)
            out.extend(reps)
    return tuple(out)


def _graphs(it):
    return [m.map.graph() if isinstance(m, LaxMorphism) else m.graph() for m in it]


# --------------------------------------------------------------------------
# Universal properties


def _bijective(domain: list, image: list, codomain: list) -> bool:
    return len(set(image)) == len(domain) and set(image) == set(codomain)


def _lift_universal(cons: Construction, bound: int):
    A = cons.obj
    X, Y = A.base, A.total
    family = cons.diagram["family"]
    for (f, T) in family:
        if any(not X.le(A(y), T(f(y))) for y in Y.elems):
            return False, {"existence": (f.graph(), T)}
    probes = list(test_objects(X, bound))
    probes += [LaxObject(X, Y, c) for c in finord.monotone_maps(Y, X.underlying)]
    for Wc in probes:
        maps = [finord.identity(Y)] if Wc.total == Y else list(finord.monotone_maps(Wc.total, Y))
        for h in maps:
            cone_ok = all(
                X.le(Wc(w), T(f(h(w)))) for f, T in family for w in Wc.total.elems
            )
            if cone_ok and any(not X.le(Wc(w), A(h(w))) for w in Wc.total.elems):
                return False, {"probe": Wc, "h": h.graph()}
    return True, None


def _hom_preorder(A: LaxObject, B: LaxObject) -> FinPreorder:
    gs = _graphs(lax_morphisms(A, B))
    Z = B.total
    return FinPreorder(gs, [(g, h) for g in gs for h in gs if all(Z.le(u, v) for (_, u), (_, v) in zip(g, h))])


def _order_iso(phi: dict, P: FinPreorder, Q: FinPreorder) -> bool:
    return all(P.le(u, v) == Q.le(phi[u], phi[v]) for u in P.elems for v in P.elems)


def _limit_universal(cons: Construction, bound: int):
    P = cons.obj
    X = P.base
    for Wc in test_objects(X, bound):
        homs = list(lax_morphisms(Wc, P))
        if cons.kind == "product":
            factors = cons.diagram["factors"]
            cones = list(itertools.product(*(_graphs(lax_morphisms(Wc, A)) for A in factors)))
            image = [tuple(tuple((w, p(m(w))) for w in Wc.total.elems) for p in cons.legs) for m in homs]
        elif cons.kind == "equalizer":
            f, g = cons.diagram["pair"]
            cones = [
                h.map.graph() for h in lax_morphisms(Wc, f.src) if all(f(h(w)) == g(h(w)) for w in Wc.total.elems)
            ]
            (e,) = cons.legs
            image = [tuple((w, e(m(w))) for w in Wc.total.elems) for m in homs]
        elif cons.kind == "pullback":
            f, g = cons.diagram["cospan"]
            cones = [
                (h1, h2)
                for h1 in _graphs(lax_morphisms(Wc, f.src))
                for h2 in _graphs(lax_morphisms(Wc, g.src))
                if all(f(y) == g(v) for (_, y), (_, v) in zip(h1, h2))
            ]
            p1, p2 = cons.legs
            image = [
                (tuple((w, p1(m(w))) for w in Wc.total.elems), tuple((w, p2(m(w))) for w in Wc.total.elems))
                for m in homs
            ]
        else:
            raise ValueError(cons.kind)
        if not _bijective(homs, image, cones):
            return False, {"probe": Wc, "mediators": len(homs), "cones": len(cones)}
        # 2-cells: m <= m' iff their legs are pointwise ordered
        for m1, i1 in zip(homs, image):
            for m2, i2 in zip(homs, image):
                le_m = all(P.total.le(m1(w), m2(w)) for w in Wc.total.elems)
                legs_le = _legs_le(cons, i1, i2)
                if le_m != legs_le:
                    return False, {"probe": Wc, "two_cell": (m1.map.graph(), m2.map.graph())}
    return True, None


def _legs_le(cons, i1, i2) -> bool:
    if cons.kind == "product":
        comps = zip(cons.diagram["factors"], i1, i2)
    elif cons.kind == "equalizer":
        comps = [(cons.diagram["pair"][0].src, i1, i2)]
    else:
        f, g = cons.diagram["cospan"]
        comps = [(f.src, i1[0], i2[0]), (g.src, i1[1], i2[1])]
    return all(A.total.le(u, v) for A, g1, g2 in comps for (_, u), (_, v) in zip(g1, g2))


def _colimit_universal(cons: Construction, bound: int):
    C = cons.obj
    X = C.base
    for Wc in test_objects(X, bound):
        homs = list(lax_morphisms(C, Wc))
        if cons.kind == "coproduct":
            summands = cons.diagram["summands"]
            cocones = list(itertools.product(*(_graphs(lax_morphisms(A, Wc)) for A in summands)))
            image = [
                tuple(tuple((e, m(j(e))) for e in A.total.elems) for A, j in zip(summands, cons.legs)) for m in homs
            ]
        elif cons.kind == "coequalizer":
            f, g = cons.diagram["pair"]
            cocones = [
                h.map.graph() for h in lax_morphisms(f.tgt, Wc) if all(h(f(y)) == h(g(y)) for y in f.src.total.elems)
            ]
            (q,) = cons.legs
            image = [tuple((z, m(q(z))) for z in f.tgt.total.elems) for m in homs]
        else:
            raise ValueError(cons.kind)
        if not _bijective(homs, image, cocones):
            return False, {"probe": Wc, "mediators": len(homs), "cocones": len(cocones)}
    return True, None


def _exponential_universal(cons: Construction, bound: int):
    E = cons.obj
    A, B = cons.diagram["exponent"], cons.diagram["target"]
    X = E.base
    for Wc in test_objects(X, bound):
        WA, _ = finord.product_ord([Wc.total, A.total])
        prod = LaxObject(X, WA, MonotoneMap(WA, X.underlying, {(w, y): X.meet(Wc(w), A(y)) for w, y in WA.elems}))
        homs = list(lax_morphisms(Wc, E))
        targets = _graphs(lax_morphisms(prod, B))
        image = [tuple(((w, y), apply_graph(k(w), y)) for w, y in WA.elems) for k in homs]
        if not _bijective(homs, image, targets):
            return False, {"probe": Wc, "transposes": len(homs), "maps": len(targets)}
    return True, None


def _power_universal(cons: Construction, bound: int):
    W, A = cons.diagram["W"], cons.diagram["A"]
    P = cons.obj
    X = P.base
    for V in test_objects(X, bound):
        if cons.kind == "power":
            lhs = _hom_preorder(V, P)
            hom = _hom_preorder(V, A)
            rhs = finord.exponential_ord(W, hom)
            phi = {
                k: tuple((w, tuple((v, apply_graph(dict(k)[v], w)) for v in V.total.elems)) for w in W.elems)
                for k in lhs.elems
            }
        else:
            lhs = _hom_preorder(P, V)
            hom = _hom_preorder(A, V)
            rhs = finord.exponential_ord(W, hom)
            phi = {
                m: tuple((w, tuple((y, dict(m)[(w, y)]) for y in A.total.elems)) for w in W.elems)
                for m in lhs.elems
            }
        if not _bijective(list(lhs.elems), list(phi.values()), list(rhs.elems)) or not _order_iso(phi, lhs, rhs):
            return False, {"probe": V}
    return True, None


def verify_universal(kind: str, cons: Construction, bound: int = 2):
    """(True, None) if the universal property holds against every probe object
    of size <= bound, else (False, counterexample)."""
    if kind == "initial_lift":
        return _lift_universal(cons, bound)
    if kind == "limit":
        return _limit_universal(cons, bound)
    if kind == "colimit":
        return _colimit_universal(cons, bound)
    if kind == "exponential":
        return _exponential_universal(cons, bound)
    if kind in ("power", "copower"):
        return _power_universal(cons, bound)
    raise ValueError(f"unknown universal property {kind!r}")


# --------------------------------------------------------------------------
# Regular epimorphism and stability oracles


def _least_structure(q: MonotoneMap, a: MonotoneMap, X: BasePoset):
    """Brute force: the least monotone c with a <= c.q, found by enumerating all c."""
    ok = [
        c for c in finord.monotone_maps(q.cod, X.underlying)
        if all(X.le(a(y), c(q(y))) for y in q.dom.elems)
    ]
    least = [c for c in ok if all(all(X.le(c(u), d(u)) for u in q.cod.elems) for d in ok)]
    return least[0] if least else None


def regular_epi_oracle(f, category: str = "lax") -> bool:
    """Is f the coequalizer of its kernel pair (in Ord, or in Ord//X)?"""
    g = f.map if isinstance(f, LaxMorphism) else f
    K, (p1, p2) = finord.pullback_ord(g, g)
    Q, (q,) = finord.coequalizer_ord(p1, p2)
    t = {}
    for y in g.dom.elems:
        if t.setdefault(q(y), g(y)) != g(y):
            return False
    if len(t) != len(Q) or set(t.values()) != set(g.cod.elems):
        return False
    if not all(Q.le(u, v) == g.cod.le(t[u], t[v]) for u in Q.elems for v in Q.elems):
        return False
    if category == "ord":
        return True
    X = f.src.base
    # kernel pair structure a.p1 meet a.p2 is not needed: the coequalizer only sees (Y, a)
    c = _least_structure(q, f.src.structure, X)
    if c is None:
        return False
    return all(c(u) == f.tgt(t[u]) for u in Q.elems)


def _pullback_along(f: LaxMorphism, g: LaxMorphism) -> LaxMorphism:
    X = f.src.base
    P, (p1, p2) = finord.pullback_ord(f.map, g.map)
    Pc = LaxObject(X, P, MonotoneMap(P, X.underlying, {(y, w): X.meet(f.src(y), g.src(w)) for y, w in P.elems}))
    return LaxMorphism(Pc, g.src, p2)


def stable_oracle(f: LaxMorphism, bound: int = 3):
    """(True, None) if every pullback of f along g: (W, c) -> (Z, b) with
    |W| <= bound is a regular epi in Ord//X, else (False, g)."""
    for Wc in test_objects(f.src.base, bound):
        for g in lax_morphisms(Wc, f.tgt):
            if not regular_epi_oracle(_pullback_along(f, g), "lax"):
                return False, g
    return True, None


# --------------------------------------------------------------------------
# Canonical forms and the gap hunter


def _classes(items, key):
    groups: dict = {}
    for it in items:
        groups.setdefault(key(it), []).append(it)
    return [groups[k] for k in sorted(groups)]


def _orderings(classes):
    for combo in itertools.product(*(itertools.permutations(c) for c in classes)):
        yield [e for part in combo for e in part]


def canonical_form(f: LaxMorphism) -> tuple:
    """Minimal encoding of f over relabellings of source and target carriers."""
    Y, Z = f.src.total, f.tgt.total
    k = elem_key
    fib = {z: tuple(sorted(k(f.src(y)) for y in Y.elems if f(y) == z)) for z in Z.elems}
    zkey = lambda z: (k(f.tgt(z)), len(Z.up(z)), len(Z.down(z)), fib[z])
    best = None
    for zs in _orderings(_classes(Z.elems, zkey)):
        zi = {z: i for i, z in enumerate(zs)}
        zenc = (
            tuple(k(f.tgt(z)) for z in zs),
            tuple(sorted((zi[u], zi[v]) for u, v in Z.leq)),
        )
        if best is not None and zenc > best[0]:
            continue
        ykey = lambda y: (zi[f(y)], k(f.src(y)), len(Y.up(y)), len(Y.down(y)))
        for ys in _orderings(_classes(Y.elems, ykey)):
            yi = {y: i for i, y in enumerate(ys)}
            enc = (
                zenc,
                (
                    tuple(k(f.src(y)) for y in ys),
                    tuple(sorted((yi[u], yi[v]) for u, v in Y.leq)),
                    tuple(zi[f(y)] for y in ys),
                ),
            )
            if best is None or enc < best:
                best = enc
    if best is None:
        return ((), ())
    return best


def relabel_canonical(f: LaxMorphism) -> LaxMorphism:
    """The representative of f's isomorphism class named y0.., z0.. by canonical position."""
    (zb, zrel), (ya, yrel, fmap) = canonical_form(f)
    X = f.src.base
    by_key = {elem_key(x): x for x in X.elems}
    zn = [f"z{i}" for i in range(len(zb))]
    yn = [f"y{i}" for i in range(len(ya))]
    Z = FinPreorder(zn, [(zn[i], zn[j]) for i, j in zrel])
    Y = FinPreorder(yn, [(yn[i], yn[j]) for i, j in yrel])
    B = LaxObject(X, Z, MonotoneMap(Z, X.underlying, {zn[i]: by_key[v] for i, v in enumerate(zb)}))
    A = LaxObject(X, Y, MonotoneMap(Y, X.underlying, {yn[i]: by_key[v] for i, v in enumerate(ya)}))
    return LaxMorphism(A, B, MonotoneMap(Y, Z, {yn[i]: zn[j] for i, j in enumerate(fmap)}))


@dataclass(frozen=True)
class GapInstance:
    morphism: LaxMorphism
    evidence: dict
    canonical: tuple = field(compare=False)
    obstruction: dict | None = field(default=None, compare=False)

    def as_dict(self) -> dict:
        f = self.morphism
        out = {
            "base": f.src.base.name or [str(x) for x in f.src.base.elems],
            "source": _describe(f.src),
            "target": _describe(f.tgt),
            "map": {str(y): f(y) for y in f.src.total.elems},
            "evidence": self.evidence,
        }
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction
        return out


def _describe(A: LaxObject) -> dict:
    return {
        "elems": list(A.total.elems),
        "le": [list(p) for p in sorted(A.total.leq, key=elem_key) if p[0] != p[1]],
        "structure": {str(y): A(y) for y in A.total.elems},
    }


def is_gap(f: LaxMorphism):
    v = descent_verdict(f)
    ev = v.evidence
    return ev.stable_regepi_lax and ev.ed_ord and not ev.ped, v


def gap_hunter(cfg: GenConfig, budget: int, obstruction_bound: int | None = None) -> list:
    """Gap instances (stable regular epi, ED downstairs, not PED) among the
    first ``budget`` generated morphisms, one per isomorphism class, sorted."""
    from .presheaf import obstruction_search

    found: dict = {}
    for f in itertools.islice(generate(cfg, "lax_morphism"), budget):
        gap, verdict = is_gap(f)
        if not gap:
            continue
        canon = canonical_form(f)
        if canon in found:
            continue
        rep = relabel_canonical(f)
        obstruction = None
        if obstruction_bound is not None:
            try:
                certs = obstruction_search(rep, obstruction_bound)
                obstruction = {"bound": obstruction_bound, "certificates": [c.as_dict() for c in certs]}
            except PreconditionFailed as exc:
                obstruction = {"bound": obstruction_bound, "refused": str(exc)}
        found[canon] = GapInstance(rep, verdict.evidence.as_dict(), canon, obstruction)
    return [found[k] for k in sorted(found)]
