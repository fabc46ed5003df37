"""Exception hierarchy shared across the package."""


class EntropyLMMError(Exception):
    """Base class for all package errors."""


class DomainError(EntropyLMMError, ValueError):
    """A point lies outside the domain where an operation is defined."""


class LinkDomainError(DomainError):
    """The multiplier combination left the conjugate's domain at some node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class BadGrid(EntropyLMMError, ValueError):
    pass


class LengthMismatch(EntropyLMMError, ValueError):
    pass


class RankDeficientBasis(EntropyLMMError, ValueError):
    pass


class InfeasibleTargets(EntropyLMMError, ValueError):
    """Raised when the targets are provably outside the feasibility region."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class BadVariance(EntropyLMMError, ValueError):
    pass


class InitFailure(EntropyLMMError):
    pass


class NotConverged(EntropyLMMError):
    """Iteration budget exhausted or step collapse.

    ``report`` holds the best iterate found so far.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoInteriorPoint(EntropyLMMError):
    pass


class SpecError(EntropyLMMError, ValueError):
    """Problem-spec file could not be parsed or validated."""
