"""Line-oriented text format for hand-written fixtures.

    # comments run to end of line
    preorder ZZ { elems: a0 a1 b1 b2; le: a0 a1; a0 b2; b1 b2; }
    poset C3 { elems: z0 z1 z2; le: z0 z1; z1 z2; }
    map fzz : ZZ -> C3 { a0 -> z0; a1 -> z1; b1 -> z1; b2 -> z2; }
    lax A = (ZZ, fzz) over C3
    lax B = (C3, id) over C3
    laxmor f = fzz : A -> B
    presheaf G : Ord over B2 { at bot: w; at p: w; at q: w; at top: ; }

Presheaf bodies take ``at X: e ...;``, ``le X: u v; u2 v2;`` and
``restrict X X2: u -> v, ...;`` statements. Undeclared base names fall back
to the built-in bases (C2, C3, B2, B3, M3, N5).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import finord, laxcomma, presheaf
from .errors import InvalidStructure, LaxOrdError
from .fixtures import BASES


class ParseError(LaxOrdError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, column {col}: {message}", witness=(line, col))
        self.line = line
        self.col = col


_TOKEN = re.compile(r"(?P<ws>\s+)|(?P<comment>#[^\n]*)|(?P<arrow>->)|(?P<punct>[{}();:,=])|(?P<word>(?:[^\s{}();:,=#-]|-(?!>))+)")


@dataclass
class Token:
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Token(m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return out


@dataclass
class Workspace:
    entries: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, name):
        return self.entries[name]

    def __contains__(self, name) -> bool:
        return name in self.entries

    def names(self, kind: str | None = None) -> list:
        return [n for n in self.entries if kind is None or self.kinds[n] == kind]

    def add(self, kind, name, value, tok=None):
        if name in self.entries:
            raise ParseError(f"duplicate name {name!r}", *(tok.line, tok.col) if tok else (0, 0))
        self.entries[name] = value
        self.kinds[name] = kind


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0
        self.ws = Workspace()

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, expect=None):
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else Token("", 1, 1)
            raise ParseError(f"unexpected end of input (expected {expect or 'more'})", last.line, last.col)
        if expect is not None and tok.text != expect:
            raise ParseError(f"expected {expect!r}, found {tok.text!r}", tok.line, tok.col)
        self.i += 1
        return tok

    def word(self, what="identifier"):
        tok = self.next()
        if tok.text in ("{", "}", "(", ")", ";", ":", ",", "=", "->"):
            raise ParseError(f"expected {what}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def statements(self):
        """Token lists between '{' and '}', split at ';'."""
        self.next("{")
        stmts, cur = [], []
        while True:
            tok = self.next()
            if tok.text == "}":
                if cur:
                    stmts.append(cur)
                return stmts
            if tok.text == ";":
                if cur:
                    stmts.append(cur)
                cur = []
            else:
                cur.append(tok)

    def parse(self):
        while self.peek() is not None:
            tok = self.next()
            handler = getattr(self, f"decl_{tok.text}", None)
            if handler is None:
                raise ParseError(f"unknown declaration {tok.text!r}", tok.line, tok.col)
            handler(tok)
        return self.ws

    # ---- references

    def ref(self, tok, kinds):
        name = tok.text
        if name in self.ws:
            kind = self.ws.kinds[name]
            if kind in kinds:
                return self.ws[name]
            if kind == "poset" and "preorder" in kinds:
                return self.ws[name].underlying
            raise ParseError(f"{name!r} is a {kind}, expected {' or '.join(kinds)}", tok.line, tok.col)
        if name in BASES:
            if "poset" in kinds:
                return BASES[name]
            if "preorder" in kinds:
                return BASES[name].underlying
        raise ParseError(f"unresolved reference {name!r}", tok.line, tok.col)

    def _forward(self, tok, fn, *args):
        try:
            return fn(*args)
        except ParseError:
            raise
        except LaxOrdError as exc:
            err = ParseError(str(exc), tok.line, tok.col)
            err.witness = exc.witness
            raise err from exc

    # ---- declarations

    def _order_body(self, name_tok):
        elems, pairs = None, []
        for st in self.statements():
            texts = [t.text for t in st]
            if texts[:2] == ["elems", ":"]:
                elems = texts[2:]
            elif texts[:2] == ["le", ":"]:
                rest = texts[2:]
                if rest:
                    if len(rest) != 2:
                        raise ParseError("a 'le' pair needs exactly two elements", st[0].line, st[0].col)
                    pairs.append(tuple(rest))
            elif len(texts) == 2:
                pairs.append(tuple(texts))
            else:
                raise ParseError(f"cannot read statement {' '.join(texts)!r}", st[0].line, st[0].col)
        if elems is None:
            raise ParseError("missing 'elems:' statement", name_tok.line, name_tok.col)
        return elems, pairs

    def decl_preorder(self, kw):
        name = self.word()
        elems, pairs = self._order_body(name)
        self.ws.add("preorder", name.text, self._forward(name, finord.mk_preorder, elems, pairs), name)

    def decl_poset(self, kw):
        name = self.word()
        elems, pairs = self._order_body(name)
        self.ws.add("poset", name.text, self._forward(name, finord.mk_poset, elems, pairs, name.text), name)

    def decl_map(self, kw):
        name = self.word()
        self.next(":")
        src_tok = self.word()
        self.next("->")
        tgt_tok = self.word()
        src = self.ref(src_tok, ("preorder",))
        tgt = self.ref(tgt_tok, ("preorder",))
        table = {}
        for st in self.statements():
            texts = [t.text for t in st]
            if len(texts) != 3 or texts[1] != "->":
                raise ParseError(f"expected 'e -> e2', found {' '.join(texts)!r}", st[0].line, st[0].col)
            if texts[0] in table:
                raise ParseError(f"{texts[0]!r} assigned twice", st[0].line, st[0].col)
            table[texts[0]] = texts[2]
        self.ws.add("map", name.text, self._forward(name, finord.mk_map, src, tgt, table), name)

    def decl_lax(self, kw):
        name = self.word()
        self.next("=")
        self.next("(")
        pre_tok = self.word()
        self.next(",")
        map_tok = self.word()
        self.next(")")
        self.next("over")
        base_tok = self.word()
        X = self.ref(base_tok, ("poset",))
        Y = self.ref(pre_tok, ("preorder",))
        if map_tok.text == "id":
            structure = {y: y for y in Y.elems}
        else:
            structure = self.ref(map_tok, ("map",))
        self.ws.add("lax", name.text, self._forward(name, laxcomma.mk_lax_object, Y, X, structure), name)

    def decl_laxmor(self, kw):
        name = self.word()
        self.next("=")
        map_tok = self.word()
        self.next(":")
        src_tok = self.word()
        self.next("->")
        tgt_tok = self.word()
        f = self.ref(map_tok, ("map",))
        A = self.ref(src_tok, ("lax",))
        B = self.ref(tgt_tok, ("lax",))
        self.ws.add("laxmor", name.text, self._forward(name, laxcomma.mk_lax_morphism, A, B, f), name)

    def decl_presheaf(self, kw):
        name = self.word()
        self.next(":")
        kind_tok = self.word("value kind")
        self.next("over")
        X = self.ref(self.word(), ("poset",))
        levels = {x: ([], []) for x in X.elems}
        restrict = {}
        current_le = None
        for st in self.statements():
            texts = [t.text for t in st]
            head = texts[0]
            if head == "at" and len(texts) >= 3 and texts[2] == ":":
                levels.setdefault(texts[1], ([], []))[0].extend(texts[3:])
                current_le = None
            elif head == "le" and len(texts) >= 3 and texts[2] == ":":
                current_le = texts[1]
                if len(texts) == 5:
                    levels.setdefault(current_le, ([], []))[1].append((texts[3], texts[4]))
                elif len(texts) != 3:
                    raise ParseError("a 'le' pair needs exactly two elements", st[0].line, st[0].col)
            elif len(texts) == 2 and current_le is not None:
                levels[current_le][1].append(tuple(texts))
            elif head == "restrict" and len(texts) >= 4 and texts[3] == ":":
                m = {}
                body = texts[4:]
                for chunk in " ".join(body).split(","):
                    parts = chunk.split()
                    if not parts:
                        continue
                    if len(parts) != 3 or parts[1] != "->":
                        raise ParseError(f"bad restriction entry {chunk.strip()!r}", st[0].line, st[0].col)
                    m[parts[0]] = parts[2]
                restrict[texts[1], texts[2]] = m
            else:
                raise ParseError(f"cannot read statement {' '.join(texts)!r}", st[0].line, st[0].col)
        unknown = [x for x in levels if x not in X]
        if unknown:
            raise ParseError(f"{unknown[0]!r} is not an element of the base", name.line, name.col)
        self.ws.add(
            "presheaf", name.text, self._forward(name, presheaf.mk_presheaf, X, kind_tok.text, levels, restrict), name
        )


def parse(text: str) -> Workspace:
    return _Parser(tokenize(text)).parse()


def _order_text(P: finord.FinPreorder) -> str:
    elems = " ".join(P.elems)
    pairs = [f"{x} {y}" for x, y in sorted(P.leq, key=finord.elem_key) if x != y]
    le = f" le: {'; '.join(pairs)};" if pairs else ""
    return f"{{ elems: {elems};{le} }}"


def format_workspace(ws: Workspace) -> str:
    """Print a workspace back to the text format; parse(format_workspace(ws)) reproduces it."""
    lines = []
    for name in ws.names():
        kind, val = ws.kinds[name], ws[name]
        if kind == "preorder":
            lines.append(f"preorder {name} {_order_text(val)}")
        elif kind == "poset":
            lines.append(f"poset {name} {_order_text(val.underlying)}")
        elif kind == "map":
            lines.append(
                f"map {name} : {_name_of(ws, val.dom)} -> {_name_of(ws, val.cod)} "
                f"{{ {' '.join(f'{e} -> {v};' for e, v in val.graph())} }}"
            )
        elif kind == "lax":
            lines.append(
                f"lax {name} = ({_name_of(ws, val.total)}, {_map_name(ws, val.structure)}) over {_name_of(ws, val.base)}"
            )
        elif kind == "laxmor":
            lines.append(
                f"laxmor {name} = {_map_name(ws, val.map)} : {_name_of(ws, val.src)} -> {_name_of(ws, val.tgt)}"
            )
        elif kind == "presheaf":
            lines.append(_presheaf_text(ws, name, val))
    return "\n".join(lines) + "\n"


def _name_of(ws: Workspace, value) -> str:
    for name, v in ws.entries.items():
        if v is value or (type(v) is type(value) and v == value):
            return name
        if isinstance(v, finord.BasePoset) and v.underlying == value:
            return name
    for name, X in BASES.items():
        if X == value or X.underlying == value:
            return name
    raise InvalidStructure(f"value {value!r} has no name in the workspace")


def _map_name(ws: Workspace, m) -> str:
    if m.dom == m.cod and all(m(e) == e for e in m.dom.elems):
        if not any(ws.kinds[n] == "map" and ws[n] == m for n in ws.entries):
            return "id"
    return _name_of(ws, m)


def _presheaf_text(ws, name, G) -> str:
    X = G.base
    parts = []
    for x in X.elems:
        parts.append(f"at {x}: {' '.join(G.at[x])};")
        strict = [f"{u} {v}" for u, v in sorted(G.rel[x], key=finord.elem_key) if u != v]
        if G.kind == "Gph":
            strict = [f"{u} {v}" for u, v in sorted(G.rel[x], key=finord.elem_key)]
        if strict:
            parts.append(f"le {x}: {'; '.join(strict)};")
    for (x, x2), m in sorted(G.restrict.items(), key=finord.elem_key):
        if x == x2 or all(m[u] == u for u in m):
            continue
        parts.append(f"restrict {x} {x2}: {', '.join(f'{u} -> {v}' for u, v in sorted(m.items()))};")
    return f"presheaf {name} : {G.kind} over {_name_of(ws, X)} {{ {' '.join(parts)} }}"
