"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GF2StructError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(GF2StructError, ValueError):
    pass


class DimensionTooLarge(GF2StructError, ValueError):
    pass


class ZeroFrequency(GF2StructError, ValueError):
    pass


class EmptySet(GF2StructError, ValueError):
    pass


class TooLarge(GF2StructError, ValueError):
    pass


class DomainError(GF2StructError, ValueError):
    pass


class BadSpec(GF2StructError, ValueError):
    pass


class PreconditionNotFlat(GF2StructError):
    def __init__(self, message: str, witness: int | None = None):
        super().__init__(message)
        self.witness = witness


class PreconditionLowEnergy(GF2StructError):
    pass


class EmptySlices(GF2StructError):
    pass


class DecrementUnavailable(GF2StructError):
    pass


class IncrementUnavailable(GF2StructError):
    pass


# The following indicate an implementation fault rather than bad input.


class SubspaceClosureViolation(GF2StructError, AssertionError):
    pass


class CertificateViolation(GF2StructError, AssertionError):
    pass


class IterationBudgetExceeded(GF2StructError, AssertionError):
    pass
