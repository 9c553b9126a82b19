"""Exception types shared across the package (the CLI maps them to exit codes)."""

from .specfun import DomainError


class PreconditionError(ValueError):
    """Inputs violate an assumption of the requested bound (symmetry, i.i.d., class membership)."""


class UnboundedResultError(ValueError):
    """A moment the bound depends on is infinite, so the bound is vacuous."""


class ResourceError(RuntimeError):
    """An exact computation would exceed its configured cell budget."""


__all__ = ["DomainError", "PreconditionError", "UnboundedResultError", "ResourceError"]
