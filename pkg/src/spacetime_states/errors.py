"""Exception types raised across the package."""


class SpacetimeStateError(Exception):
    """Base class for all package errors."""


class DimensionError(SpacetimeStateError, ValueError):
    pass


class InvalidStateError(SpacetimeStateError, ValueError):
    """A vector or matrix violates the invariants of its state type."""


class NotUnitaryError(SpacetimeStateError, ValueError):
    pass


class LatticeError(SpacetimeStateError, ValueError):
    """Malformed lattice objects: events, cuts, regions."""


class FoliationError(SpacetimeStateError, ValueError):
    """A foliation or surface fails validation; ``problems`` lists each violation."""

    def __init__(self, message: str, problems: list | None = None):
        super().__init__(message)
        self.problems = list(problems or [])


class BranchAnnihilatedError(SpacetimeStateError):
    """A postselected measurement outcome has zero Born probability."""


class PreconditionError(SpacetimeStateError, ValueError):
    pass
