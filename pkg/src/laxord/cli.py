"""Command-line front end: ``laxord COMMAND ...``.

Exit codes: 0 when the property holds or the command succeeded, 1 when it is
false (or a descent verdict is NotEffective / Unknown), 2 on invalid input.
"""

from __future__ import annotations

import argparse
import enum
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__, descent, dsl, finord, laxcomma, oracle, presheaf
from .errors import LaxOrdError
from .finord import elem_key
from .fixtures import BASES

EXIT_TRUE, EXIT_FALSE, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    pass


def jsonable(v):
    """Elements are nested tuples of strings; make them plain JSON."""
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, dict):
        return {_key(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (frozenset, set)):
        return [jsonable(x) for x in sorted(v, key=elem_key)]
    if isinstance(v, (tuple, list)):
        return [jsonable(x) for x in v]
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    return str(v)


def _key(k) -> str:
    return k if isinstance(k, str) else show(k)


def show(e) -> str:
    """Compact text for a carrier element."""
    if isinstance(e, tuple):
        if all(isinstance(p, tuple) and len(p) == 2 for p in e) and e:
            return "{" + ", ".join(f"{show(y)}->{show(z)}" for y, z in e) + "}"
        return "(" + ", ".join(show(p) for p in e) + ")"
    return str(e)


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def make_report(command, inputs, result, evidence=None, witnesses=None, seed=None) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "result": result,
        "evidence": evidence or {},
        "witnesses": witnesses or {},
        "version": __version__,
        "seed": seed,
    }


# --------------------------------------------------------------------------
# Workspace helpers


def load(path: str) -> dsl.Workspace:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return dsl.parse(text)


def lookup(ws: dsl.Workspace, name: str, *kinds):
    if name in ws:
        kind = ws.kinds[name]
        if kind in kinds:
            return ws[name]
        if kind == "poset" and "preorder" in kinds:
            return ws[name].underlying
        raise InputError(f"{name!r} is a {kind}, expected {' or '.join(kinds)}")
    if name in BASES and "poset" in kinds:
        return BASES[name]
    raise InputError(f"no {' or '.join(kinds)} named {name!r}")


def structure_table(A: laxcomma.LaxObject) -> list[str]:
    rows = [(show(y), str(A(y))) for y in A.total.elems]
    width = max([len(r[0]) for r in rows] + [7])
    out = [f"{'element':<{width}}  structure"]
    out += [f"{y:<{width}}  {x}" for y, x in rows]
    return out


def describe_lax(A: laxcomma.LaxObject) -> dict:
    return {
        "base": A.base.name,
        "carrier": list(A.total.elems),
        "le": [list(p) for p in sorted(A.total.leq, key=elem_key) if p[0] != p[1]],
        "structure": {show(y): A(y) for y in A.total.elems},
    }


# --------------------------------------------------------------------------
# Commands. Each returns (report, exit code, human-readable lines).

CHECKS = {
    # property: (workspace kinds, function returning (holds, witness))
    "monotone": ("map",),
    "regular-epi-ord": ("map",),
    "stable-regular-epi-ord": ("map",),
    "effective-descent-ord": ("map",),
    "regular-epi-lax": ("laxmor",),
    "stable-regular-epi-lax": ("laxmor",),
    "ped": ("laxmor",),
    "cartesian-closed": ("poset",),
    "exponentiable": ("lax",),
    "exponentiable-strict": ("lax",),
}


def _check(prop, value):
    if prop == "monotone":
        return True, None
    if prop == "regular-epi-ord":
        fail = finord.regular_epi_ord_failure(value)
        return fail is None, fail
    if prop == "stable-regular-epi-ord":
        c = finord.lift_chains(value, 2)
        return c.holds, c.failure
    if prop == "effective-descent-ord":
        c = finord.ed_check(value)
        return c.holds, c.failure
    if prop == "regular-epi-lax":
        fail = descent.regular_epi_lax_failure(value)
        return fail is None, fail
    if prop == "stable-regular-epi-lax":
        fail = descent.stable_regular_epi_lax_failure(value)
        return fail is None, fail
    if prop == "ped":
        c = descent.satisfies_PED(value, keep_lifts=False)
        return c.holds, c.failure
    if prop == "cartesian-closed":
        for x in value.elems:
            fail = value.exponentiability_failure(x)
            if fail is not None:
                return False, {"x": x, "y": fail[0], "z": fail[1]}
        return True, None
    if prop == "exponentiable":
        bad = laxcomma.exponentiability_witnesses(value)
        return not bad, bad or None
    if prop == "exponentiable-strict":
        fail = laxcomma.strict_exponentiability_failure(value)
        return fail is None, fail
    raise InputError(f"unknown property {prop!r}")


def cmd_check(args):
    ws = load(args.file)
    value = lookup(ws, args.name, *CHECKS[args.property])
    holds, witness = _check(args.property, value)
    report = make_report(
        "check",
        {"file": args.file, "property": args.property, "name": args.name},
        holds,
        {args.property: holds},
        {args.property: witness} if witness is not None else {},
    )
    lines = [f"{args.property}({args.name}): {'true' if holds else 'false'}"]
    if witness is not None:
        lines.append(f"witness: {show(witness) if isinstance(witness, tuple) else witness}")
    return report, EXIT_TRUE if holds else EXIT_FALSE, lines


def cmd_construct(args):
    ws = load(args.file)
    kind = args.kind
    inputs = {"file": args.file, "kind": kind}
    if kind == "exponential":
        if not (args.of and args.exp):
            raise InputError("exponential needs --of B --exp A")
        B, A = lookup(ws, args.of, "lax"), lookup(ws, args.exp, "lax")
        inputs.update(of=args.of, exp=args.exp)
        cons = laxcomma.exponential_lax(A, B)
    elif kind in ("product", "coproduct"):
        if not args.objects:
            raise InputError(f"{kind} needs --objects A ...")
        objs = [lookup(ws, n, "lax") for n in args.objects]
        inputs["objects"] = args.objects
        cons = (laxcomma.product_lax if kind == "product" else laxcomma.coproduct_lax)(objs)
    elif kind in ("equalizer", "coequalizer", "pullback"):
        if not args.pair or len(args.pair) != 2:
            raise InputError(f"{kind} needs --pair f g")
        f, g = (lookup(ws, n, "laxmor") for n in args.pair)
        inputs["pair"] = args.pair
        build = {"equalizer": laxcomma.equalizer_lax, "coequalizer": laxcomma.coequalizer_lax,
                 "pullback": laxcomma.pullback_lax}[kind]
        cons = build(f, g)
    elif kind in ("power", "copower"):
        if not (args.weight and args.object):
            raise InputError(f"{kind} needs --weight W --object A")
        W, A = lookup(ws, args.weight, "preorder"), lookup(ws, args.object, "lax")
        inputs.update(weight=args.weight, object=args.object)
        cons = laxcomma.power_copower(kind, W, A)
    elif kind == "lift":
        if not (args.source and args.family):
            raise InputError("lift needs --source Y --family MAP:LAX ...")
        Y = lookup(ws, args.source, "preorder")
        family = []
        for item in args.family:
            mname, _, tname = item.partition(":")
            family.append((lookup(ws, mname, "map"), lookup(ws, tname, "lax")))
        base = lookup(ws, args.base, "poset") if args.base else None
        inputs.update(source=args.source, family=args.family)
        cons = laxcomma.initial_lift(Y, family, base)
    else:
        raise InputError(f"unknown construction {kind!r}")
    A = cons.obj
    lines = [f"{kind} over {A.base.name or 'X'}: {len(A.total)} elements"]
    lines += structure_table(A)
    result = describe_lax(A)
    return make_report("construct", inputs, result), EXIT_TRUE, lines


def cmd_descent(args):
    ws = load(args.file)
    f = lookup(ws, args.morphism, "laxmor")
    v = descent.descent_verdict(f, strict=args.strict)
    ev = v.evidence.as_dict()
    report = make_report(
        "descent",
        {"file": args.file, "morphism": args.morphism, "strict": args.strict},
        v.verdict.value,
        ev,
        v.evidence.witnesses,
    )
    lines = [f"verdict: {v.verdict.value}"]
    lines += [f"  {k}: {'true' if b else 'false'}" for k, b in ev.items()]
    for k, w in v.evidence.witnesses.items():
        if k != "PED_lifts":
            lines.append(f"  {k} witness: {jsonable(w)}")
    code = EXIT_TRUE if v.verdict is descent.Verdict.EFFECTIVE else EXIT_FALSE
    return report, code, lines


def cmd_presheaf(args):
    ws = load(args.file)
    inputs = {"file": args.file}
    if args.represent:
        G = lookup(ws, args.represent, "presheaf")
        inputs["represent"] = args.represent
        A, reason = presheaf.representable_as_pi(G)
        ok = A is not None
        result = describe_lax(A) if ok else None
        lines = [f"representable({args.represent}): {'true' if ok else 'false'}"]
        if ok:
            lines += structure_table(A)
        else:
            lines.append(f"reason: {reason}")
        report = make_report("presheaf", inputs, result, {"representable": ok}, {} if ok else {"reason": reason})
        return report, EXIT_TRUE if ok else EXIT_FALSE, lines
    if not args.morphism:
        raise InputError("presheaf needs --morphism NAME or --represent NAME")
    f = lookup(ws, args.morphism, "laxmor")
    inputs["morphism"] = args.morphism
    alpha = presheaf.pi_on_morphism(f)
    fail = presheaf.presheaf_descent_failure(alpha)
    ok = fail is None
    evidence = {"descent_levelwise": ok}
    witnesses = {} if ok else {"descent_levelwise": fail}
    lines = [f"Pi({args.morphism}) effective for descent in [X^op, Ord]: {'true' if ok else 'false'}"]
    if not ok:
        lines.append(f"  failing level: {jsonable(fail)}")
    result = ok
    if args.obstruct is not None:
        inputs["obstruct"] = args.obstruct
        inputs["require_precondition"] = not args.no_precondition
        try:
            certs = presheaf.obstruction_search(f, args.obstruct, require_precondition=not args.no_precondition)
        except LaxOrdError as exc:
            lines.append(f"obstruction search refused: {exc}")
            witnesses["obstruction_refused"] = str(exc)
            report = make_report("presheaf", inputs, result, evidence, witnesses)
            return report, EXIT_FALSE, lines
        result = [c.as_dict() for c in certs]
        evidence["certificates"] = len(certs)
        lines.append(f"obstruction certificates up to size {args.obstruct}: {len(certs)}")
        for c in certs[:5]:
            lines.append(f"  #{c.cursor} {c.reason}: {jsonable(c.as_dict()['levels'])}")
        ok = bool(certs)
    return make_report("presheaf", inputs, result, evidence, witnesses), EXIT_TRUE if ok else EXIT_FALSE, lines


def cmd_hunt(args):
    if args.base not in BASES:
        raise InputError(f"unknown base {args.base!r}; choose from {', '.join(BASES)}")
    if args.max_size < 0 or args.budget < 0:
        raise InputError("--max-size and --budget must be non-negative")
    cfg = oracle.GenConfig(args.seed, args.max_size, (BASES[args.base],), args.density)
    found = oracle.gap_hunter(cfg, args.budget, args.obstruct)
    certs = [g.as_dict() for g in found]
    if args.out:
        write_atomic(args.out, dumps(certs))
    inputs = {"base": args.base, "max_size": args.max_size, "budget": args.budget, "density": args.density,
              "obstruct": args.obstruct}
    report = make_report("hunt", inputs, certs, {"gap_instances": len(certs)}, seed=args.seed)
    lines = [f"{len(certs)} gap instance(s) over {args.base} in {args.budget} draws (seed {args.seed})"]
    for g in found:
        f = g.morphism
        lines.append("  " + ", ".join(f"{y}[{f.src(y)}]->{f(y)}[{f.tgt(f(y))}]" for y in f.src.total.elems))
    return report, EXIT_TRUE if certs else EXIT_FALSE, lines


def cmd_oracle(args):
    if args.test == "universal":
        if args.seed is None:
            raise InputError("universal needs --seed")
        return _oracle_universal(args)
    if not (args.file and args.morphism):
        raise InputError(f"{args.test} needs FILE and --morphism NAME")
    ws = load(args.file)
    inputs = {"file": args.file, "test": args.test, "morphism": args.morphism}
    if args.test == "regepi-ord":
        m = lookup(ws, args.morphism, "map", "laxmor")
        ok = oracle.regular_epi_oracle(m.map if isinstance(m, laxcomma.LaxMorphism) else m, "ord")
        witnesses = {}
    elif args.test == "regepi-lax":
        ok = oracle.regular_epi_oracle(lookup(ws, args.morphism, "laxmor"), "lax")
        witnesses = {}
    else:
        inputs["bound"] = args.bound
        ok, g = oracle.stable_oracle(lookup(ws, args.morphism, "laxmor"), args.bound)
        witnesses = {} if g is None else {"pullback_along": {"source": describe_lax(g.src),
                                                             "map": {show(w): g(w) for w in g.src.total.elems}}}
    lines = [f"oracle {args.test}({args.morphism}): {'true' if ok else 'false'}"]
    return make_report("oracle", inputs, ok, {args.test: ok}, witnesses), EXIT_TRUE if ok else EXIT_FALSE, lines


def _oracle_universal(args):
    cfg = oracle.GenConfig(args.seed, args.max_size)
    failures = []
    kind = args.kind
    if kind == "initial_lift":
        stream = oracle.generate(cfg, "family")
        build = lambda item: laxcomma.initial_lift(item[0], item[1], item[2])
    elif kind in ("product", "coproduct"):
        stream = oracle.generate(cfg, "parallel_pair")
        build = lambda fg: (laxcomma.product_lax if kind == "product" else laxcomma.coproduct_lax)(
            [fg[0].src, fg[0].tgt])
    elif kind in ("equalizer", "coequalizer"):
        stream = oracle.generate(cfg, "parallel_pair")
        build = lambda fg: (laxcomma.equalizer_lax if kind == "equalizer" else laxcomma.coequalizer_lax)(*fg)
    elif kind == "pullback":
        stream = oracle.generate(cfg, "cospan")
        build = lambda fg: laxcomma.pullback_lax(*fg)
    else:
        raise InputError(f"unknown universal kind {kind!r}")
    verify_kind = {"initial_lift": "initial_lift", "product": "limit", "equalizer": "limit", "pullback": "limit",
                   "coproduct": "colimit", "coequalizer": "colimit"}[kind]
    for i in range(args.count):
        cons = build(next(stream))
        ok, witness = oracle.verify_universal(verify_kind, cons, args.bound)
        if not ok:
            failures.append({"index": i, "witness": str(witness)})
    ok = not failures
    inputs = {"test": "universal", "kind": kind, "count": args.count, "bound": args.bound, "max_size": args.max_size}
    lines = [f"verify_universal({kind}) on {args.count} seeded instances: {len(failures)} failure(s)"]
    report = make_report("oracle", inputs, ok, {"failures": len(failures)}, {"failures": failures} if failures else {},
                         seed=args.seed)
    return report, EXIT_TRUE if ok else EXIT_FALSE, lines


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="laxord", description="Finite computations in the lax comma category Ord//X.")
    p.add_argument("--version", action="version", version=f"laxord {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", metavar="PATH", help="also write a machine-readable report to PATH")
        return sp

    c = common(sub.add_parser("check", help="test a named property of a declared structure"))
    c.add_argument("property", choices=sorted(CHECKS))
    c.add_argument("file")
    c.add_argument("name")
    c.set_defaults(run=cmd_check)

    c = common(sub.add_parser("construct", help="build a limit, colimit, exponential, power, copower or lift"))
    c.add_argument("kind", choices=["exponential", "product", "coproduct", "equalizer", "coequalizer", "pullback",
                                    "power", "copower", "lift"])
    c.add_argument("file")
    c.add_argument("--of", help="exponential target B")
    c.add_argument("--exp", help="exponent A")
    c.add_argument("--objects", nargs="+", metavar="LAX")
    c.add_argument("--pair", nargs=2, metavar="LAXMOR")
    c.add_argument("--weight", metavar="PREORDER")
    c.add_argument("--object", metavar="LAX")
    c.add_argument("--source", metavar="PREORDER")
    c.add_argument("--family", nargs="+", metavar="MAP:LAX")
    c.add_argument("--base", metavar="POSET", help="base for an empty lift family")
    c.set_defaults(run=cmd_construct)

    c = common(sub.add_parser("descent", help="effective-descent verdict for a lax morphism"))
    c.add_argument("file")
    c.add_argument("--morphism", required=True)
    c.add_argument("--strict", action="store_true", help="also count a failed stable-regular-epi test as NotEffective")
    c.set_defaults(run=cmd_descent)

    c = common(sub.add_parser("presheaf", help="presheaf-side checks and bounded obstruction search"))
    c.add_argument("file")
    c.add_argument("--morphism")
    c.add_argument("--represent", metavar="PRESHEAF", help="decide whether a declared presheaf is of the form Pi(W,d)")
    c.add_argument("--obstruct", type=int, metavar="BOUND")
    c.add_argument("--no-precondition", action="store_true", help="search even when Pi(f) fails the descent test")
    c.set_defaults(run=cmd_presheaf)

    c = common(sub.add_parser("hunt", help="seeded search for gap instances"))
    c.add_argument("--base", required=True)
    c.add_argument("--max-size", type=int, default=2)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--budget", type=int, default=1000)
    c.add_argument("--density", type=float, default=0.4)
    c.add_argument("--obstruct", type=int, metavar="BOUND")
    c.add_argument("--out", metavar="PATH", help="write the certificate list to PATH")
    c.set_defaults(run=cmd_hunt)

    c = common(sub.add_parser("oracle", help="run a brute-force oracle"))
    c.add_argument("test", choices=["regepi-ord", "regepi-lax", "stable", "universal"])
    c.add_argument("file", nargs="?")
    c.add_argument("--morphism")
    c.add_argument("--bound", type=int, default=2)
    c.add_argument("--kind", default="initial_lift",
                   choices=["initial_lift", "product", "coproduct", "equalizer", "coequalizer", "pullback"])
    c.add_argument("--seed", type=int)
    c.add_argument("--count", type=int, default=50)
    c.add_argument("--max-size", type=int, default=3)
    c.set_defaults(run=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code, lines = args.run(args)
    except dsl.ParseError as exc:
        print(f"laxord: parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InputError, LaxOrdError) as exc:
        print(f"laxord: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for line in lines:
        print(line)
    if args.json:
        write_atomic(args.json, dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
