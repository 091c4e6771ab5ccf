"""Exception hierarchy shared by the numerical modules and the CLI."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class NumericRefusalError(DomainError):
    """A numerical path was asked to evaluate something it cannot sample,
    e.g. a Dirac delta."""


class CoefficientConditionError(DomainError):
    """Sampled coefficients break the linear growth or Lipschitz condition."""


class ConvergenceError(RuntimeError):
    """A quadrature or iteration did not reach its tolerance.

    ``index`` is set when the failure belongs to one point of a batch.
    """

    def __init__(self, message: str, *, index: int | None = None, result=None):
        super().__init__(message)
        self.index = index
        self.result = result


class NonContractionError(ConvergenceError):
    """Picard gaps stopped shrinking."""
