"""Finite preorders, monotone maps, the finite constructions of Ord, and
lattice/Heyting structure on a complete base poset."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import DiagramMismatch, InvalidStructure, NotComplete, NotExponentiable, NotMonotone

Elem = Hashable

# Completeness is checked over every subset up to this carrier size.
EXHAUSTIVE_COMPLETENESS_LIMIT = 10


def elem_key(e: Elem) -> str:
    """Total order on identifiers used by every enumeration."""
    return repr(e)


def _close(n: int, rows: list[int]) -> list[int]:
    # Warshall on bit rows; rows[i] has bit j iff i <= j.
    for k in range(n):
        bit = 1 << k
        rk = rows[k]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rk
    return rows


class FinPreorder:
    """A finite carrier with a reflexive-transitive relation, stored closed.

    Elements are kept sorted by :func:`elem_key`; ``leq`` holds every pair.
    Instances are immutable and hashable.
    """

    __slots__ = ("elems", "leq", "_up", "_down", "_hash")

    def __init__(self, elems: Iterable[Elem], leq: Iterable[tuple[Elem, Elem]]):
        # Trusted path: callers pass a closed relation. Use mk_preorder otherwise.
        self.elems = tuple(sorted(elems, key=elem_key))
        self.leq = frozenset(leq)
        up: dict = {e: set() for e in self.elems}
        down: dict = {e: set() for e in self.elems}
        for x, y in self.leq:
            up[x].add(y)
            down[y].add(x)
        self._up = {e: frozenset(s) for e, s in up.items()}
        self._down = {e: frozenset(s) for e, s in down.items()}
        self._hash = None

    @classmethod
    def closure(cls, elems: Sequence[Elem], pairs: Iterable[tuple[Elem, Elem]]) -> "FinPreorder":
        elems = tuple(sorted(elems, key=elem_key))
        index = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        rows = [1 << i for i in range(n)]
        for x, y in pairs:
            rows[index[x]] |= 1 << index[y]
        _close(n, rows)
        leq = [(elems[i], elems[j]) for i in range(n) for j in range(n) if rows[i] >> j & 1]
        return cls(elems, leq)

    def le(self, x: Elem, y: Elem) -> bool:
        return (x, y) in self.leq

    def up(self, x: Elem) -> frozenset:
        return self._up[x]

    def down(self, x: Elem) -> frozenset:
        return self._down[x]

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __contains__(self, e) -> bool:
        return e in self._up

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinPreorder):
            return NotImplemented
        return self.elems == other.elems and self.leq == other.leq

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.elems, self.leq))
        return self._hash

    def __repr__(self) -> str:
        strict = sorted((p for p in self.leq if p[0] != p[1]), key=elem_key)
        return f"FinPreorder({list(self.elems)!r}, {strict!r})"

    def is_antisymmetric(self) -> bool:
        return all(x == y or (y, x) not in self.leq for x, y in self.leq)

    def is_discrete(self) -> bool:
        return len(self.leq) == len(self.elems)

    def sub(self, keep: Iterable[Elem]) -> "FinPreorder":
        """Induced sub-preorder on ``keep``."""
        keep = set(keep)
        return FinPreorder(keep, ((x, y) for x, y in self.leq if x in keep and y in keep))

    def covers(self) -> list[tuple[Elem, Elem]]:
        """Strict pairs x < y with nothing strictly between (used for printing)."""
        out = []
        for x, y in sorted(self.leq, key=elem_key):
            if x == y or self.le(y, x):
                continue
            if not any(
                z not in (x, y) and self.le(x, z) and self.le(z, y) and not self.le(z, x) and not self.le(y, z)
                for z in self.elems
            ):
                out.append((x, y))
        return out


def mk_preorder(elems: Sequence[Elem], pairs: Iterable[tuple[Elem, Elem]] = ()) -> FinPreorder:
    """Reflexive-transitive closure of ``pairs`` on ``elems``."""
    elems = list(elems)
    seen = set()
    for e in elems:
        if e in seen:
            raise InvalidStructure(f"duplicate identifier {e!r}", witness=e)
        seen.add(e)
    pairs = list(pairs)
    for p in pairs:
        for e in p:
            if e not in seen:
                raise InvalidStructure(f"unknown identifier {e!r} in pair {p!r}", witness=p)
    return FinPreorder.closure(elems, pairs)


class MonotoneMap:
    """A relation-preserving function between finite preorders."""

    __slots__ = ("dom", "cod", "table", "_hash")

    def __init__(self, dom: FinPreorder, cod: FinPreorder, table: Mapping):
        # Trusted path: use mk_map to validate.
        self.dom = dom
        self.cod = cod
        self.table = dict(table)
        self._hash = None

    def __call__(self, e: Elem) -> Elem:
        return self.table[e]

    def graph(self) -> tuple:
        return tuple((e, self.table[e]) for e in self.dom.elems)

    def image(self) -> set:
        return set(self.table.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self.table == other.table

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dom, self.cod, self.graph()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{e!r}->{v!r}" for e, v in self.graph())
        return f"MonotoneMap({body})"

    def is_surjective(self) -> bool:
        return self.image() == set(self.cod.elems)


def mk_map(dom: FinPreorder, cod: FinPreorder, assignments: Mapping) -> MonotoneMap:
    for e in dom.elems:
        if e not in assignments:
            raise InvalidStructure(f"map is not total: no image for {e!r}", witness=e)
    extra = [e for e in assignments if e not in dom]
    if extra:
        raise InvalidStructure(f"map assigns unknown source element {extra[0]!r}", witness=extra[0])
    for e in dom.elems:
        if assignments[e] not in cod:
            raise InvalidStructure(f"image {assignments[e]!r} of {e!r} is not in the codomain", witness=e)
    for x, y in sorted(dom.leq, key=elem_key):
        if not cod.le(assignments[x], assignments[y]):
            raise NotMonotone(
                f"not monotone: {x!r} <= {y!r} but {assignments[x]!r} !<= {assignments[y]!r}",
                witness=(x, y),
            )
    return MonotoneMap(dom, cod, {e: assignments[e] for e in dom.elems})


def identity(P: FinPreorder) -> MonotoneMap:
    return MonotoneMap(P, P, {e: e for e in P.elems})


def compose(g: MonotoneMap, f: MonotoneMap) -> MonotoneMap:
    """g after f."""
    if f.cod != g.dom:
        raise DiagramMismatch("cannot compose: codomain of f is not the domain of g")
    return MonotoneMap(f.dom, g.cod, {e: g.table[f.table[e]] for e in f.dom.elems})


def is_monotone(dom: FinPreorder, cod: FinPreorder, table: Mapping) -> bool:
    return all(cod.le(table[x], table[y]) for x, y in dom.leq)


def monotone_maps(
    dom: FinPreorder,
    cod: FinPreorder,
    allowed: Callable[[Elem], Iterable[Elem]] | None = None,
) -> Iterator[MonotoneMap]:
    """All monotone maps ``dom -> cod`` in lexicographic order of their graphs.

    ``allowed(e)`` optionally restricts the candidate images of ``e``.
    """
    order = dom.elems
    n = len(order)
    cands = []
    for e in order:
        ok = set(allowed(e)) if allowed else None
        cands.append([c for c in cod.elems if ok is None or c in ok])
    below = [[j for j in range(i) if dom.le(order[j], order[i])] for i in range(n)]
    above = [[j for j in range(i) if dom.le(order[i], order[j])] for i in range(n)]
    img: list = [None] * n
    leq = cod.leq

    def rec(i):
        if i == n:
            yield MonotoneMap(dom, cod, dict(zip(order, img)))
            return
        for c in cands[i]:
            if all((img[j], c) in leq for j in below[i]) and all((c, img[j]) in leq for j in above[i]):
                img[i] = c
                yield from rec(i + 1)

    yield from rec(0)


def find_isomorphism(
    P: FinPreorder,
    Q: FinPreorder,
    label_p: Callable[[Elem], Hashable] | None = None,
    label_q: Callable[[Elem], Hashable] | None = None,
) -> dict | None:
    """A label-preserving order isomorphism ``P -> Q`` as a dict, or None."""
    if len(P) != len(Q) or len(P.leq) != len(Q.leq):
        return None

    def inv(R, lab, e):
        return (len(R.up(e)), len(R.down(e)), lab(e) if lab else None)

    ip = {e: inv(P, label_p, e) for e in P.elems}
    iq = {e: inv(Q, label_q, e) for e in Q.elems}
    if sorted(map(repr, ip.values())) != sorted(map(repr, iq.values())):
        return None
    order = list(P.elems)
    phi: dict = {}
    used: set = set()

    def rec(i):
        if i == len(order):
            return True
        p = order[i]
        for q in Q.elems:
            if q in used or iq[q] != ip[p]:
                continue
            if all(P.le(p, p2) == Q.le(q, phi[p2]) and P.le(p2, p) == Q.le(phi[p2], q) for p2 in order[:i]):
                phi[p] = q
                used.add(q)
                if rec(i + 1):
                    return True
                del phi[p]
                used.discard(q)
        return False

    return dict(phi) if rec(0) else None


# --------------------------------------------------------------------------
# Limits and colimits in Ord


class OrdConstruction(NamedTuple):
    obj: FinPreorder
    maps: tuple


def product_ord(factors: Sequence[FinPreorder]) -> OrdConstruction:
    factors = list(factors)
    elems = list(itertools.product(*(F.elems for F in factors)))
    leq = [
        (u, v)
        for u in elems
        for v in itertools.product(*(F.up(c) for F, c in zip(factors, u)))
    ]
    P = FinPreorder(elems, leq)
    projs = tuple(MonotoneMap(P, F, {u: u[i] for u in P.elems}) for i, F in enumerate(factors))
    return OrdConstruction(P, projs)


def coproduct_ord(summands: Sequence[FinPreorder]) -> OrdConstruction:
    summands = list(summands)
    elems = [(i, e) for i, S in enumerate(summands) for e in S.elems]
    leq = [((i, x), (i, y)) for i, S in enumerate(summands) for x, y in S.leq]
    C = FinPreorder(elems, leq)
    injs = tuple(MonotoneMap(S, C, {e: (i, e) for e in S.elems}) for i, S in enumerate(summands))
    return OrdConstruction(C, injs)


def _parallel(f: MonotoneMap, g: MonotoneMap):
    if f.dom != g.dom or f.cod != g.cod:
        raise DiagramMismatch("parallel pair must share domain and codomain")


def equalizer_ord(f: MonotoneMap, g: MonotoneMap) -> OrdConstruction:
    _parallel(f, g)
    M = f.dom.sub(y for y in f.dom.elems if f(y) == g(y))
    return OrdConstruction(M, (MonotoneMap(M, f.dom, {y: y for y in M.elems}),))


def pullback_ord(f: MonotoneMap, g: MonotoneMap) -> OrdConstruction:
    """Pullback of the cospan ``f: Y -> Z <- W: g``; elements are pairs (y, w)."""
    if f.cod != g.cod:
        raise DiagramMismatch("cospan legs must share a codomain")
    Y, W = f.dom, g.dom
    fib: dict = {}
    for w in W.elems:
        fib.setdefault(g(w), []).append(w)
    elems = [(y, w) for y in Y.elems for w in fib.get(f(y), ())]
    S = set(elems)
    leq = [((y, w), v) for y, w in elems for v in itertools.product(Y.up(y), W.up(w)) if v in S]
    P = FinPreorder(elems, leq)
    return OrdConstruction(
        P, (MonotoneMap(P, Y, {u: u[0] for u in elems}), MonotoneMap(P, W, {u: u[1] for u in elems}))
    )


def coequalizer_ord(f: MonotoneMap, g: MonotoneMap) -> OrdConstruction:
    """Quotient of the codomain by the equivalence generated by f(y) ~ g(y).

    Classes are named by the sorted tuple of their members.
    """
    _parallel(f, g)
    Z = f.cod
    parent = {z: z for z in Z.elems}

    def find(z):
        while parent[z] != z:
            parent[z] = parent[parent[z]]
            z = parent[z]
        return z

    for y in f.dom.elems:
        a, b = find(f(y)), find(g(y))
        if a != b:
            parent[a] = b
    groups: dict = {}
    for z in Z.elems:
        groups.setdefault(find(z), []).append(z)
    name = {}
    for members in groups.values():
        cls = tuple(sorted(members, key=elem_key))
        for z in members:
            name[z] = cls
    Q = FinPreorder.closure(sorted(set(name.values()), key=elem_key), {(name[x], name[y]) for x, y in Z.leq})
    return OrdConstruction(Q, (MonotoneMap(Z, Q, name),))


def lim_colim_ord(kind: str, data) -> OrdConstruction:
    """Dispatch: ``data`` is a list of objects (product/coproduct) or a pair of maps."""
    if kind == "product":
        return product_ord(data)
    if kind == "coproduct":
        return coproduct_ord(data)
    if kind == "equalizer":
        return equalizer_ord(*data)
    if kind == "pullback":
        return pullback_ord(*data)
    if kind == "coequalizer":
        return coequalizer_ord(*data)
    raise ValueError(f"unknown construction kind {kind!r}")


def exponential_ord(Y: FinPreorder, Z: FinPreorder) -> FinPreorder:
    """Monotone maps Y -> Z, each named by its graph, ordered pointwise."""
    graphs = [m.graph() for m in monotone_maps(Y, Z)]
    by_graph = {gr: dict(gr) for gr in graphs}
    leq = [
        (f, g)
        for f in graphs
        for g in graphs
        if all(Z.le(by_graph[f][y], by_graph[g][y]) for y in Y.elems)
    ]
    return FinPreorder(graphs, leq)


def apply_graph(graph: tuple, y: Elem) -> Elem:
    for k, v in graph:
        if k == y:
            return v
    raise KeyError(y)


# --------------------------------------------------------------------------
# The complete base poset X


class BasePoset:
    """A finite complete lattice: antisymmetric, with all meets and joins.

    Meets and joins of pairs are tabulated at construction.
    """

    __slots__ = ("underlying", "name", "top", "bottom", "_meet", "_join", "_expo", "_impl")

    def __init__(self, underlying: FinPreorder, name: str | None = None):
        P = underlying
        if not P.is_antisymmetric():
            x, y = next((x, y) for x, y in sorted(P.leq, key=elem_key) if x != y and P.le(y, x))
            raise InvalidStructure(f"base is not antisymmetric: {x!r} and {y!r}", witness=(x, y))
        self.underlying = P
        self.name = name
        if not P.elems:
            raise NotComplete("the empty poset has no top element", witness=())
        self.top = self._glb(())
        self.bottom = self._lub(())
        if self.top is None or self.bottom is None:
            raise NotComplete("base lacks a top or bottom element", witness=())
        self._meet = {}
        self._join = {}
        for x in P.elems:
            for y in P.elems:
                m, j = self._glb((x, y)), self._lub((x, y))
                if m is None or j is None:
                    raise NotComplete(f"no meet or join for {{{x!r}, {y!r}}}", witness=(x, y))
                self._meet[x, y] = m
                self._join[x, y] = j
        if len(P) <= EXHAUSTIVE_COMPLETENESS_LIMIT:
            for r in range(3, len(P) + 1):
                for S in itertools.combinations(P.elems, r):
                    if self._glb(S) is None or self._lub(S) is None:
                        raise NotComplete(f"no meet or join for {set(S)!r}", witness=S)
        self._expo = {}
        self._impl = {}

    def _glb(self, S):
        P = self.underlying
        lower = [z for z in P.elems if all(P.le(z, s) for s in S)]
        best = [l for l in lower if all(P.le(m, l) for m in lower)]
        return best[0] if best else None

    def _lub(self, S):
        P = self.underlying
        upper = [z for z in P.elems if all(P.le(s, z) for s in S)]
        best = [u for u in upper if all(P.le(u, m) for m in upper)]
        return best[0] if best else None

    @property
    def elems(self) -> tuple:
        return self.underlying.elems

    def __len__(self) -> int:
        return len(self.underlying)

    def __contains__(self, e) -> bool:
        return e in self.underlying

    def le(self, x, y) -> bool:
        return (x, y) in self.underlying.leq

    def meet(self, x, y):
        return self._meet[x, y]

    def join(self, x, y):
        return self._join[x, y]

    def meet_all(self, S: Iterable) -> Elem:
        out = self.top
        for s in S:
            out = self._meet[out, s]
        return out

    def join_all(self, S: Iterable) -> Elem:
        out = self.bottom
        for s in S:
            out = self._join[out, s]
        return out

    def residual_candidate(self, x, y):
        """Join of {z : z meet x <= y}; the implication when x is exponentiable."""
        key = (x, y)
        if key not in self._impl:
            self._impl[key] = self.join_all(z for z in self.elems if self.le(self._meet[z, x], y))
        return self._impl[key]

    def exponentiability_failure(self, x):
        """First (y, z) breaking ``z <= y^x iff z meet x <= y``, or None."""
        if x not in self._expo:
            self._expo[x] = None
            for y in self.elems:
                c = self.residual_candidate(x, y)
                bad = next((z for z in self.elems if self.le(z, c) != self.le(self._meet[z, x], y)), None)
                if bad is not None:
                    self._expo[x] = (y, bad)
                    break
        return self._expo[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BasePoset):
            return NotImplemented
        return self.underlying == other.underlying

    def __hash__(self) -> int:
        return hash(self.underlying)

    def __repr__(self) -> str:
        return f"BasePoset({self.name or list(self.elems)!r})"


def mk_poset(elems: Sequence[Elem], pairs: Iterable[tuple[Elem, Elem]] = (), name: str | None = None) -> BasePoset:
    return BasePoset(mk_preorder(elems, pairs), name=name)


def bound(X: BasePoset, S: Iterable[Elem], direction: str = "meet") -> Elem:
    S = list(S)
    for s in S:
        if s not in X:
            raise InvalidStructure(f"{s!r} is not an element of the base", witness=s)
    if direction == "meet":
        return X.meet_all(S)
    if direction == "join":
        return X.join_all(S)
    raise ValueError(f"direction must be 'meet' or 'join', not {direction!r}")


def is_exponentiable_element(X: BasePoset, x: Elem) -> bool:
    return X.exponentiability_failure(x) is None


def heyting_impl(X: BasePoset, x: Elem, y: Elem) -> Elem:
    """The implication y^x: the largest z with z meet x <= y."""
    failure = X.exponentiability_failure(x)
    if failure is not None:
        y0, z = failure
        raise NotExponentiable(
            f"{x!r} is not exponentiable: for y={y0!r} the residuation law fails at z={z!r}",
            witness={"x": x, "y": y0, "z": z},
        )
    return X.residual_candidate(x, y)


def is_frame(X: BasePoset) -> bool:
    """Binary distributivity; for finite lattices this is the frame law."""
    m, j = X.meet, X.join
    return all(m(x, j(y, z)) == j(m(x, y), m(x, z)) for x in X.elems for y in X.elems for z in X.elems)


# --------------------------------------------------------------------------
# Epimorphism classes in Ord


@dataclass(frozen=True)
class ChainCheck:
    """Outcome of a chain-lifting test; truthy iff every chain lifts."""

    holds: bool
    failure: tuple | None = None
    lifts: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds


def chains(P: FinPreorder, length: int) -> Iterator[tuple]:
    """Weakly increasing chains z0 <= ... of the given length."""
    if length == 0:
        yield ()
        return
    for z in P.elems:
        yield from _extend(P, (z,), length)


def _extend(P, prefix, length):
    if len(prefix) == length:
        yield prefix
        return
    for z in sorted(P.up(prefix[-1]), key=elem_key):
        yield from _extend(P, prefix + (z,), length)


def lift_chains(
    f: MonotoneMap,
    length: int,
    anchor: Callable[[Elem, Elem], bool] | None = None,
    keep_lifts: bool = False,
) -> ChainCheck:
    """Does every chain of ``length`` in cod(f) lift to a chain in dom(f)?

    ``anchor(y0, z0)`` adds a side condition on the first element of the lift.
    """
    Y = f.dom
    fibres: dict = {}
    for y in Y.elems:
        fibres.setdefault(f(y), []).append(y)
    lifts = {}

    def lift(zs):
        def rec(prefix):
            i = len(prefix)
            if i == len(zs):
                return prefix
            for y in fibres.get(zs[i], ()):
                if i == 0 and anchor is not None and not anchor(y, zs[0]):
                    continue
                if i and not Y.le(prefix[-1], y):
                    continue
                found = rec(prefix + (y,))
                if found:
                    return found
            return None

        return rec(())

    for zs in chains(f.cod, length):
        ys = lift(zs)
        if ys is None:
            return ChainCheck(False, zs, lifts)
        if keep_lifts:
            lifts[zs] = ys
    return ChainCheck(True, None, lifts)


def regular_epi_ord_failure(f: MonotoneMap):
    """Why f is not a regular epi in Ord: ('unreached', z) or ('ungenerated', (z, z')); None if it is."""
    Z = f.cod
    missing = [z for z in Z.elems if z not in f.image()]
    if missing:
        return ("unreached", missing[0])
    generated = FinPreorder.closure(Z.elems, {(f(x), f(y)) for x, y in f.dom.leq})
    extra = sorted(Z.leq - generated.leq, key=elem_key)
    if extra:
        return ("ungenerated", extra[0])
    return None


def is_regular_epi_ord(f: MonotoneMap) -> bool:
    return regular_epi_ord_failure(f) is None


def is_stable_regular_epi_ord(f: MonotoneMap) -> bool:
    return lift_chains(f, 2).holds


def ed_check(f: MonotoneMap, keep_lifts: bool = False) -> ChainCheck:
    return lift_chains(f, 3, keep_lifts=keep_lifts)


def is_effective_descent_ord(f: MonotoneMap) -> bool:
    return lift_chains(f, 3).holds


def least_extension(f: MonotoneMap, a: MonotoneMap, X: BasePoset) -> MonotoneMap:
    """b(z) = join of a(y) over f(y) <= z: the least monotone b with a <= b.f."""
    if a.dom != f.dom:
        raise DiagramMismatch("structure and map must share a domain")
    Z = f.cod
    b = {z: X.join_all(a(y) for y in f.dom.elems if Z.le(f(y), z)) for z in Z.elems}
    return MonotoneMap(Z, X.underlying, b)
