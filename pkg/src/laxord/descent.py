"""(Stable) regular epimorphisms and the effective-descent sandwich in Ord//X.

A morphism is reported ``EFFECTIVE`` when the pointwise chain condition (PED)
holds, ``NOT_EFFECTIVE`` when one of the two known necessary conditions fails
(3-chain lifting downstairs, regular epi in Ord//X), and ``UNKNOWN`` otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import finord
from .finord import BasePoset, ChainCheck, MonotoneMap, elem_key
from .laxcomma import LaxMorphism


def least_extension(f: MonotoneMap, a: MonotoneMap, base: BasePoset) -> MonotoneMap:
    """Least monotone b: Z -> X with a <= b.f, namely b(z) = join{a(y) : f(y) <= z}."""
    return finord.least_extension(f, a, base)


def regular_epi_lax_failure(f: LaxMorphism):
    """None when f is a regular epi in Ord//X, else a (reason, witness) pair."""
    failure = finord.regular_epi_ord_failure(f.map)
    if failure is not None:
        return failure
    b = least_extension(f.map, f.src.structure, f.src.base)
    for z in f.tgt.total.elems:
        if b(z) != f.tgt(z):
            return ("structure", z)
    return None


def is_regular_epi_lax(f: LaxMorphism) -> bool:
    return regular_epi_lax_failure(f) is None


def stable_regular_epi_lax_failure(f: LaxMorphism):
    pairs = finord.lift_chains(f.map, 2)
    if not pairs:
        return ("pair", pairs.failure)
    X = f.src.base
    fibre_join = {z: X.bottom for z in f.tgt.total.elems}
    for y in f.src.total.elems:
        z = f(y)
        fibre_join[z] = X.join(fibre_join[z], f.src(y))
    for z in f.tgt.total.elems:
        if fibre_join[z] != f.tgt(z):
            return ("fibre", z)
    return None


def is_stable_regular_epi_lax(f: LaxMorphism) -> bool:
    return stable_regular_epi_lax_failure(f) is None


def satisfies_PED(f: LaxMorphism, keep_lifts: bool = True) -> ChainCheck:
    """Every z0 <= z1 <= z2 lifts to y0 <= y1 <= y2 with a(y0) = b(z0).

    The result is truthy iff the condition holds; ``lifts`` maps each chain
    to one lifting chain and ``failure`` names the first chain without one.
    """
    return finord.lift_chains(f.map, 3, anchor=lambda y, z: f.src(y) == f.tgt(z), keep_lifts=keep_lifts)


class Verdict(enum.Enum):
    EFFECTIVE = "Effective"
    NOT_EFFECTIVE = "NotEffective"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Evidence:
    regepi_lax: bool
    stable_regepi_lax: bool
    ed_ord: bool
    ped: bool
    witnesses: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {
            "regepi_lax": self.regepi_lax,
            "stable_regepi_lax": self.stable_regepi_lax,
            "ED_ord": self.ed_ord,
            "PED": self.ped,
        }


@dataclass(frozen=True)
class DescentVerdict:
    verdict: Verdict
    evidence: Evidence

    @property
    def effective_triggered(self) -> bool:
        return self.evidence.ped

    @property
    def not_effective_triggered(self) -> bool:
        return not self.evidence.ed_ord or not self.evidence.regepi_lax


def descent_verdict(f: LaxMorphism, strict: bool = False) -> DescentVerdict:
    """Classify f; with ``strict`` a failed stable-regular-epi test also gives NotEffective."""
    reg = regular_epi_lax_failure(f)
    stable = stable_regular_epi_lax_failure(f)
    ed = finord.ed_check(f.map)
    ped = satisfies_PED(f)
    witnesses = {}
    if reg is not None:
        witnesses["regepi_lax"] = list(reg)
    if stable is not None:
        witnesses["stable_regepi_lax"] = list(stable)
    if not ed:
        witnesses["ED_ord"] = list(ed.failure)
    if not ped:
        witnesses["PED"] = list(ped.failure)
    else:
        witnesses["PED_lifts"] = [[list(zs), list(ys)] for zs, ys in sorted(ped.lifts.items(), key=elem_key)]
    ev = Evidence(reg is None, stable is None, ed.holds, ped.holds, witnesses)
    if ev.ped:
        verdict = Verdict.EFFECTIVE
    elif not ev.ed_ord or not ev.regepi_lax or (strict and not ev.stable_regepi_lax):
        verdict = Verdict.NOT_EFFECTIVE
    else:
        verdict = Verdict.UNKNOWN
    return DescentVerdict(verdict, ev)
