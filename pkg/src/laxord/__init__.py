"""Finite computations in the lax comma category Ord//X of preorders over a complete lattice."""

__version__ = "0.1.0"

from .errors import (
    DiagramMismatch,
    InvalidStructure,
    LaxOrdError,
    LaxTriangleViolation,
    NotComplete,
    NotExponentiable,
    NotMonotone,
    PreconditionFailed,
)
from .finord import BasePoset, FinPreorder, MonotoneMap, mk_map, mk_poset, mk_preorder
from .laxcomma import LaxMorphism, LaxObject, mk_lax_morphism, mk_lax_object
from .descent import Verdict, descent_verdict

__all__ = [
    "BasePoset",
    "DiagramMismatch",
    "FinPreorder",
    "InvalidStructure",
    "LaxMorphism",
    "LaxObject",
    "LaxOrdError",
    "LaxTriangleViolation",
    "MonotoneMap",
    "NotComplete",
    "NotExponentiable",
    "NotMonotone",
    "PreconditionFailed",
    "Verdict",
    "descent_verdict",
    "mk_lax_morphism",
    "mk_lax_object",
    "mk_map",
    "mk_poset",
    "mk_preorder",
]
