"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class PreconditionError(ValueError):
    """An operation was called on inputs that violate its contract."""


class RegimeError(PreconditionError):
    """The parameters are outside the dynamical regime an analysis needs."""


class MapOverflowError(OverflowError):
    """Applying the map produced a non-finite value."""
