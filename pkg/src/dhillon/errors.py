"""Exception hierarchy shared by all dhillon modules."""


class DhillonError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DhillonError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class InputError(DhillonError, ValueError):
    """User-supplied data (CLI arguments, CSV rows) is invalid."""


class NoBracket(DhillonError):
    """Root finding could not locate a sign change."""


class MaxIterExceeded(DhillonError):
    """An iterative routine hit its iteration cap without converging."""


class NotConverged(DhillonError):
    """An optimizer finished without meeting its convergence criteria."""


class MomentDoesNotExist(DomainError):
    """The requested raw moment is infinite for these parameters."""


class MrlUndefined(DomainError):
    """Mean residual life is undefined (requires shape > 1)."""


class DegenerateData(DhillonError):
    """The dataset cannot identify the parameters (too small or all equal)."""


class ImproperPosterior(DhillonError):
    """The requested prior yields an improper posterior; sampling refused."""


class DegenerateSeries(DhillonError):
    """A diagnostic was asked of a series with zero variance."""


class EmptyChain(DhillonError):
    """An operation requires a non-empty MCMC chain."""


class EmptyInput(DhillonError):
    """An aggregate was requested over an empty collection."""
