"""Exception hierarchy shared by every module."""


class SchattenMultError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(SchattenMultError, ValueError):
    """Shapes of the inputs do not fit together."""


class DomainError(SchattenMultError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotAFrameError(DomainError):
    """The system fails the lower frame bound gate."""


class NotInvertibleError(DomainError):
    """An operator required to be invertible fails the condition gate."""


class InvalidSpecError(DomainError):
    """A generalized-dual parameterization violates its invariants."""
