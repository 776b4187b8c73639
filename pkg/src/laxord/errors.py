"""Exception hierarchy shared by every module."""

from __future__ import annotations


class LaxOrdError(ValueError):
    """Base class; ``witness`` carries the offending data when there is one."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidStructure(LaxOrdError):
    pass


class NotMonotone(LaxOrdError):
    pass


class NotComplete(InvalidStructure):
    pass


class NotExponentiable(LaxOrdError):
    pass


class LaxTriangleViolation(LaxOrdError):
    pass


class DiagramMismatch(LaxOrdError):
    pass


class PreconditionFailed(LaxOrdError):
    pass
