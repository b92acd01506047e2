"""Exception hierarchy shared by all modules."""


class UmbilicError(Exception):
    """Base class for errors raised by this package."""


class DomainError(UmbilicError, ValueError):
    """An argument lies outside the domain of the operation."""


class QuadratureError(UmbilicError, ArithmeticError):
    """Numerical integration failed to reach the requested accuracy."""


class OracleError(UmbilicError, ArithmeticError):
    """The finite-difference shape-operator oracle could not be evaluated."""


class AssemblyError(UmbilicError, ValueError):
    """A hypersurface cannot be assembled from the given profile."""


class EmptySlabError(UmbilicError, ValueError):
    """A hypersurface has no points inside the slab of a warped transfer."""
