"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input is outside the mathematical domain of an operation."""


class DegenerateImmersionError(RuntimeError):
    """A chart pushforward lost rank at the requested parameter point."""


class PreconditionError(ValueError):
    """A stated precondition of an operation does not hold at this input."""
