"""Exception types raised across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of a function or sampler."""


class PoleError(DomainError):
    """A function was evaluated at one of its poles."""


class SamplerFailure(RuntimeError):
    """A rejection sampler exhausted its iteration budget."""


class NotTractableError(NotImplementedError):
    """The requested quantity has no tractable closed form for this model."""


class MartingaleCorrectionUnavailable(DomainError):
    """E[exp(L_1)] is infinite, so no risk-neutral drift exists."""


class InvalidModelError(ValueError):
    """One or more parameter constraints of a model are violated.

    ``problems`` holds one message per violated constraint.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
