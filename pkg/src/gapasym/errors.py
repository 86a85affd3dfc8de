"""Exception hierarchy.

Input problems raise ``ValueError`` (or a subclass); anything that goes wrong
inside a numerical procedure raises a :class:`NumericalFailure`.
"""

from __future__ import annotations


class NumericalFailure(ArithmeticError):
    """A numerical procedure did not converge or lost its accuracy."""


class ConditioningError(NumericalFailure):
    """A structured matrix or recurrence became too ill-conditioned to trust.

    ``largest_usable`` is the largest order that was still computed reliably,
    when the failing procedure can tell.
    """

    def __init__(self, message: str, largest_usable: int | None = None):
        super().__init__(message)
        self.largest_usable = largest_usable


class NotPositiveDefinite(ConditioningError):
    """Cholesky factorization met a pivot that is not safely positive."""

    def __init__(self, index: int, pivot: float):
        super().__init__(
            f"matrix is not positive definite: pivot {index} = {pivot!r}",
            largest_usable=index,
        )
        self.index = index
        self.pivot = pivot


class AiryDomainError(ValueError):
    """Airy function requested outside the validated argument range."""
